"""Desk-scale checks of the combinatorial criteria behind the engine.

Three groups of appliances live here.  The flower-graph checks compare the
solver's verdict on encoded set families against the subset-domination
criterion that is supposed to characterize it, across a schedule of copy
counts, because the finite encodings only approximate families whose
components repeat without bound.  The disjoint-union checks evaluate the
four component-wise sufficient conditions for domination between tagged
unions, and the matching single-component refutation criterion.  The
interval check factors a domination query between linear orders with pinned
increasing tuples into independent queries on the segments between pinned
entries.

Every report carries the raw solver verdicts next to the criterion's
prediction; nothing is inferred silently.  Solver calls that run out of
their node budget surface as the string verdict ``"unresolved"`` rather
than a guess.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bfgame import NodeBudgetError, Position, bf_geq, bf_leq
from .structures import (
    ComponentSpec,
    Family,
    Signature,
    SizeBudgetError,
    Structure,
    build_flower_graph,
    disjoint_union,
)

MAX_LOOP_LENGTH = 8
MAX_FLOWER_SIZE = 160


def dominates(s: Family, t: Family) -> bool:
    """Every member of ``t`` contains some member of ``s``."""
    return all(any(small <= big for small in s.sets) for big in t.sets)


def parse_family_literal(text: str, universe_bound: int | None = None) -> Family:
    """Parse ``"{1,2};{3};{}"`` into a family.

    Semicolons separate members, commas separate elements, whitespace is
    ignored.  Without an explicit bound the smallest universe containing
    every element is used (at least 1, so the empty family literal of one
    empty member stays valid).
    """
    members = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not (chunk.startswith("{") and chunk.endswith("}")):
            raise ValueError(f"family member {chunk!r} is not brace-delimited")
        inner = chunk[1:-1].strip()
        if not inner:
            members.append(frozenset())
            continue
        try:
            elements = frozenset(int(part.strip()) for part in inner.split(","))
        except ValueError:
            raise ValueError(f"family member {chunk!r} has a non-integer element")
        if any(e < 0 for e in elements):
            raise ValueError(f"family member {chunk!r} has a negative element")
        members.append(elements)
    if not members:
        raise ValueError("a family needs at least one member")
    needed = 1 + max((max(m) for m in members if m), default=0)
    if universe_bound is None:
        universe_bound = needed
    elif universe_bound < needed:
        raise ValueError(f"universe bound {universe_bound} below largest element")
    return Family(frozenset(members), universe_bound)


# --------------------------------------------------------------------------
# flower-graph claims


@dataclass(frozen=True)
class TruncationRow:
    """Solver outcome at one copy count.

    ``verdict`` is "true", "false", or "unresolved" (node budget ran out);
    ``agrees`` compares it with the domination criterion and is None when
    unresolved.
    """

    copies: int
    verdict: str
    agrees: bool | None


@dataclass(frozen=True)
class SubsetClaimReport:
    dominates_holds: bool
    rows: tuple[TruncationRow, ...]
    stabilized: bool
    stable_verdict: str | None
    agreement: bool | None


def _flower_size(family: Family, copies: int) -> int:
    per_copy = sum(1 + sum(k + 2 for k in member) for member in family.sets)
    return copies * per_copy


def _guard_flower_budget(family: Family, copies: int) -> None:
    for member in family.sets:
        for k in member:
            if k + 3 > MAX_LOOP_LENGTH:
                raise SizeBudgetError(
                    f"element {k} encodes a loop of length {k + 3}, over the cap"
                )
    size = _flower_size(family, copies)
    if size > MAX_FLOWER_SIZE:
        raise SizeBudgetError(f"flower graph would have {size} vertices")


def verify_claim_subsetleq2(
    s: Family,
    t: Family,
    copies_schedule: list[int],
    *,
    node_budget: int | None = 150_000,
) -> SubsetClaimReport:
    """Compare clock-2 solver verdicts on encoded families with domination.

    For each scheduled copy count ``k`` the relation query runs on the two
    flower graphs at that truncation.  Verdicts are reported per row; the
    schedule "stabilized" when its two largest copy counts resolved to the
    same verdict, and only then is the agreement with :func:`dominates`
    judged.
    """
    if not copies_schedule:
        raise ValueError("empty copy schedule")
    expected = dominates(s, t)
    rows = []
    for copies in sorted(copies_schedule):
        _guard_flower_budget(s, copies)
        _guard_flower_budget(t, copies)
        left = build_flower_graph(s, copies)
        right = build_flower_graph(t, copies)
        try:
            outcome = bf_leq(
                Position(left, (), right, (), 2), node_budget=node_budget
            )
            verdict = "true" if outcome.holds else "false"
        except NodeBudgetError:
            verdict = "unresolved"
        agrees = None if verdict == "unresolved" else (verdict == "true") == expected
        rows.append(TruncationRow(copies, verdict, agrees))
    last_two = rows[-2:]
    stabilized = (
        len(last_two) == 2
        and last_two[0].verdict == last_two[1].verdict
        and last_two[1].verdict != "unresolved"
    )
    stable_verdict = rows[-1].verdict if stabilized else None
    agreement = (stable_verdict == "true") == expected if stabilized else None
    return SubsetClaimReport(expected, tuple(rows), stabilized, stable_verdict, agreement)


@dataclass(frozen=True)
class CopyClaimReport:
    """Hypothesis checks and solver verdict for the clock-3 copy claim.

    ``verdict`` is None when a hypothesis failed: the claim is then not
    asserted at all, and ``failures`` says which premise broke.
    """

    hypothesis_ok: bool
    failures: tuple[str, ...]
    verdict: str | None


def verify_claim_geq3(
    s: Family,
    t: Family,
    copies: int,
    *,
    node_budget: int | None = 150_000,
) -> CopyClaimReport:
    """Check the one-directional clock-3 claim on encoded families.

    Hypotheses: every member of ``s`` is a member of ``t``, and ``t`` is
    dominated by ``s``.  When both hold the solver evaluates whether the
    encoding of ``s`` relates backward to the encoding of ``t`` at clock 3.
    Only this direction is ever asserted; the claim has no converse.
    """
    failures = []
    if not s.sets <= t.sets:
        failures.append("some member of s is not a member of t")
    if not dominates(s, t):
        failures.append("some member of t contains no member of s")
    if failures:
        return CopyClaimReport(False, tuple(failures), None)
    _guard_flower_budget(s, copies)
    _guard_flower_budget(t, copies)
    left = build_flower_graph(s, copies)
    right = build_flower_graph(t, copies)
    try:
        outcome = bf_geq(Position(left, (), right, (), 3), node_budget=node_budget)
        verdict = "true" if outcome.holds else "false"
    except NodeBudgetError:
        verdict = "unresolved"
    return CopyClaimReport(True, (), verdict)


# --------------------------------------------------------------------------
# disjoint-union criteria


@dataclass(frozen=True)
class UnionCriteriaReport:
    """Outcome of the four component-wise domination conditions.

    Counterexamples: a position pair for the class-pattern condition, a
    pinned position for the per-class condition, and component indices for
    the two covering conditions.  ``conclusion_checked`` is True only when
    all four conditions held and the full-union query actually ran.
    """

    cond_a: bool
    counter_a: tuple[int, int] | None
    cond_b: bool
    counter_b: int | None
    cond_c: bool
    counter_c: int | None
    cond_d: bool
    counter_d: int | None
    multiplicity: int
    conclusion_checked: bool
    conclusion_holds: bool | None

    def __post_init__(self) -> None:
        if self.conclusion_checked and not (
            self.cond_a and self.cond_b and self.cond_c and self.cond_d
        ):
            raise ValueError("conclusion checked despite a failed condition")

    @property
    def all_conditions_hold(self) -> bool:
        return self.cond_a and self.cond_b and self.cond_c and self.cond_d


def _locate(spec: ComponentSpec, element: int) -> tuple[int, int, int]:
    """Map an assembled-union element to (part index, instance, offset)."""
    start = 0
    for part_index, (structure, multiplicity) in enumerate(spec.parts):
        span = structure.size * multiplicity
        if element < start + span:
            inner = element - start
            return part_index, inner // structure.size, inner % structure.size
        start += span
    raise ValueError(f"element {element} outside the assembled union")


def _check_shared_signature(a_spec: ComponentSpec, b_spec: ComponentSpec) -> None:
    if a_spec.signature != b_spec.signature:
        raise ValueError("component specs use different signatures")
    if a_spec.tag_relation_name != b_spec.tag_relation_name:
        raise ValueError("component specs use different class-tag names")


def check_union_criteria(
    a_spec: ComponentSpec,
    a_tuple: tuple[int, ...],
    b_spec: ComponentSpec,
    b_tuple: tuple[int, ...],
    n: int,
    *,
    node_budget: int | None = None,
) -> UnionCriteriaReport:
    """Evaluate the component-wise sufficient conditions for union domination.

    The four conditions, over the assembled unions A and B with pinned
    tuples: (a) positions fall in a common class on one side exactly when
    they do on the other; (b) for each common class block, the pinned
    sub-tuples dominate component-wise at clock ``n``; (c) every A-component
    type dominates some B-component type at ``n``; (d) every B-component
    type dominates some A-component type at ``n - 1``.  When all hold, the
    full-union query runs and its verdict is reported; at high enough
    multiplicity it must come back true.
    """
    _check_shared_signature(a_spec, b_spec)
    if len(a_tuple) != len(b_tuple):
        raise ValueError("pinned tuples must have equal length")
    if n < 1:
        raise ValueError("clock must be at least 1")

    a_loc = [_locate(a_spec, e) for e in a_tuple]
    b_loc = [_locate(b_spec, e) for e in b_tuple]
    a_class = [(p, i) for p, i, _ in a_loc]
    b_class = [(p, i) for p, i, _ in b_loc]

    cond_a, counter_a = True, None
    for k, l in itertools.combinations(range(len(a_tuple)), 2):
        if (a_class[k] == a_class[l]) != (b_class[k] == b_class[l]):
            cond_a, counter_a = False, (k, l)
            break

    # Blocks of the common refinement: positions sharing a class on both
    # sides simultaneously.  When condition (a) holds this is exactly the
    # class pattern of either side.
    blocks: dict[tuple[tuple[int, int], tuple[int, int]], list[int]] = {}
    for pos in range(len(a_tuple)):
        blocks.setdefault((a_class[pos], b_class[pos]), []).append(pos)

    cond_b, counter_b = True, None
    for (a_cls, b_cls), positions in sorted(blocks.items()):
        a_part = a_spec.parts[a_cls[0]][0]
        b_part = b_spec.parts[b_cls[0]][0]
        sub_a = tuple(a_loc[p][2] for p in positions)
        sub_b = tuple(b_loc[p][2] for p in positions)
        query = Position(a_part, sub_a, b_part, sub_b, n)
        if not bf_geq(query, node_budget=node_budget).holds:
            cond_b, counter_b = False, positions[0]
            break

    cond_c, counter_c = True, None
    for i, (a_part, _) in enumerate(a_spec.parts):
        if not any(
            bf_geq(Position(a_part, (), b_part, (), n), node_budget=node_budget).holds
            for b_part, _ in b_spec.parts
        ):
            cond_c, counter_c = False, i
            break

    cond_d, counter_d = True, None
    for j, (b_part, _) in enumerate(b_spec.parts):
        if not any(
            bf_geq(
                Position(b_part, (), a_part, (), n - 1), node_budget=node_budget
            ).holds
            for a_part, _ in a_spec.parts
        ):
            cond_d, counter_d = False, j
            break

    multiplicity = min(
        min((m for _, m in a_spec.parts), default=1),
        min((m for _, m in b_spec.parts), default=1),
    )
    conclusion_checked = cond_a and cond_b and cond_c and cond_d
    conclusion_holds = None
    if conclusion_checked:
        union_a = disjoint_union(a_spec)
        union_b = disjoint_union(b_spec)
        query = Position(union_a, a_tuple, union_b, b_tuple, n)
        conclusion_holds = bf_geq(query, node_budget=node_budget).holds
    return UnionCriteriaReport(
        cond_a,
        counter_a,
        cond_b,
        counter_b,
        cond_c,
        counter_c,
        cond_d,
        counter_d,
        multiplicity,
        conclusion_checked,
        conclusion_holds,
    )


@dataclass(frozen=True)
class UnionRefutationReport:
    """Result of hunting for a component that refutes union domination.

    ``witness_index`` names the first B-component type no A-component type
    dominates at clock ``n - 1``, or None when every one of them is
    dominated; ``refutation_verified`` reports whether the full unions
    indeed fail to relate at clock ``n`` (None when there is no witness,
    since then nothing is claimed).
    """

    witness_index: int | None
    refutation_verified: bool | None


def check_union_refutation(
    a_spec: ComponentSpec,
    b_spec: ComponentSpec,
    n: int,
    *,
    node_budget: int | None = None,
) -> UnionRefutationReport:
    """Search for a single component blocking domination of the unions.

    If some B-component type is dominated by no A-component type at clock
    ``n - 1``, the full union B cannot dominate the full union A at clock
    ``n``; the report carries the witness and the verified full-union
    verdict.
    """
    _check_shared_signature(a_spec, b_spec)
    if n < 1:
        raise ValueError("clock must be at least 1")
    witness_index = None
    for j, (b_part, _) in enumerate(b_spec.parts):
        if not any(
            bf_geq(
                Position(a_part, (), b_part, (), n - 1), node_budget=node_budget
            ).holds
            for a_part, _ in a_spec.parts
        ):
            witness_index = j
            break
    if witness_index is None:
        return UnionRefutationReport(None, None)
    union_a = disjoint_union(a_spec)
    union_b = disjoint_union(b_spec)
    verdict = bf_geq(
        Position(union_b, (), union_a, (), n), node_budget=node_budget
    )
    return UnionRefutationReport(witness_index, not verdict.holds)


# --------------------------------------------------------------------------
# interval factoring on linear orders


@dataclass(frozen=True)
class IntervalDecomposition:
    """Aligned chains induced between consecutive pinned entries.

    Segment 0 runs below the first pinned entry and the last segment runs
    above the last one (the boundaries behave as virtual endpoints at minus
    and plus infinity), so the segments partition each order minus its
    pinned tuple.
    """

    segments: tuple[tuple[Structure, Structure], ...]


@dataclass(frozen=True)
class IntervalFactoringReport:
    direct: bool
    per_interval: tuple[bool, ...]
    factored: bool
    agreement: bool
    decomposition: IntervalDecomposition


def _linear_order_relation(structure: Structure) -> str:
    """Name of the order relation, after checking the strict-order axioms."""
    relations = structure.signature.relations
    if len(relations) != 1 or relations[0][1] != 2:
        raise ValueError("expected exactly one binary relation")
    name = relations[0][0]
    table = structure.table(name)
    for x in range(structure.size):
        if (x, x) in table:
            raise ValueError(f"order is reflexive at {x}")
        for y in range(structure.size):
            if x == y:
                continue
            if ((x, y) in table) == ((y, x) in table):
                raise ValueError(f"order is not total on {{{x},{y}}}")
            for z in range(structure.size):
                if (x, y) in table and (y, z) in table and (x, z) not in table:
                    raise ValueError(f"order is not transitive at ({x},{y},{z})")
    return name


def _chain(name: str, size: int) -> Structure:
    rows = {(i, j) for i in range(size) for j in range(i + 1, size)}
    return Structure.of(Signature(((name, 2),)), size, {name: rows})


def _segment_sizes(order_size: int, pinned: tuple[int, ...]) -> list[int]:
    bounds = [-1, *pinned, order_size]
    return [bounds[i + 1] - bounds[i] - 1 for i in range(len(bounds) - 1)]


def interval_factoring_check(
    a: Structure,
    a_tuple: tuple[int, ...],
    b: Structure,
    b_tuple: tuple[int, ...],
    n: int,
) -> IntervalFactoringReport:
    """Compare a pinned-order domination query against its interval factors.

    Both inputs must satisfy the strict linear order axioms and the pinned
    tuples must be strictly increasing and of equal length.  The direct
    verdict asks whether ``(a, a_tuple)`` dominates ``(b, b_tuple)`` at
    clock ``n``; the factored verdict conjoins the same query over each
    aligned pair of induced segments (with end segments included).  The two
    must agree; the report shows both so a disagreement would be visible.
    """
    name_a = _linear_order_relation(a)
    name_b = _linear_order_relation(b)
    if name_a != name_b:
        raise ValueError("order relations are named differently")
    if len(a_tuple) != len(b_tuple):
        raise ValueError("pinned tuples must have equal length")
    for label, structure, pinned in (("left", a, a_tuple), ("right", b, b_tuple)):
        if any(not (0 <= v < structure.size) for v in pinned):
            raise ValueError(f"{label} tuple out of range")
        if any(pinned[i] >= pinned[i + 1] for i in range(len(pinned) - 1)):
            raise ValueError(f"{label} tuple is not strictly increasing")
    if n < 0:
        raise ValueError("clock must be non-negative")

    direct = bf_geq(Position(a, a_tuple, b, b_tuple, n)).holds
    sizes_a = _segment_sizes(a.size, a_tuple)
    sizes_b = _segment_sizes(b.size, b_tuple)
    segments = tuple(
        (_chain(name_a, sa), _chain(name_a, sb))
        for sa, sb in zip(sizes_a, sizes_b)
    )
    per_interval = tuple(
        bf_geq(Position(left, (), right, (), n)).holds for left, right in segments
    )
    factored = all(per_interval)
    return IntervalFactoringReport(
        direct,
        per_interval,
        factored,
        direct == factored,
        IntervalDecomposition(segments),
    )
