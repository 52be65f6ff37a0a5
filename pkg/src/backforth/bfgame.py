"""Asymmetric back-and-forth game engine.

``bf_leq`` decides whether the left structure-with-tuple relates to the right
one at a given clock value: at clock 0 the paired tuples must satisfy the
same relation atoms, and at clock ``n + 1`` every challenge tuple played in
the right structure must admit a reply in the left structure such that the
swapped position survives at clock ``n``.

Two load-bearing facts shape the implementation, both exercised by the test
suite against a definition-direct oracle:

* Replies are invariant under duplicating or permuting challenge positions
  (apply the same position map to both sides), so the full injective
  enumeration of the right structure is a dominant challenge: searching it
  alone decides the relation, and it doubles as a universally valid witness
  move on failing positions.
* The reply search is a constraint problem: each reply position's candidate
  set against the already-pinned prefix can be computed up front, and an
  empty candidate set refutes the position without any backtracking.

The solver memoizes per structure pair, takes an optional node budget (a
dedicated error reports exhaustion so callers can report a truncated search
honestly), and knows one sound shortcut: with empty pinned tuples and clock
at least 2, a fully isolated left element whose unary type has no fully
isolated counterpart on the right is unanswerable, because round one pins
the whole right structure and round two then demands a reply adjacent to
nothing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .formulas import Atomic, Forall, Formula, Or, negate
from .structures import ElementTuple, Structure

Strategy = Callable[["Position", ElementTuple], ElementTuple]


class NodeBudgetError(RuntimeError):
    """The reply search exceeded its node budget; the verdict is unknown."""


class GameContractError(ValueError):
    """An operation was called on a position violating its precondition."""


class FormulaBudgetError(RuntimeError):
    """A synthesized formula would exceed the disjunction budget."""


@dataclass(frozen=True)
class Position:
    """Asserts (left, left_tuple) relates to (right, right_tuple) at clock."""

    left: Structure
    left_tuple: ElementTuple
    right: Structure
    right_tuple: ElementTuple
    clock: int

    def __post_init__(self) -> None:
        if len(self.left_tuple) != len(self.right_tuple):
            raise ValueError("pinned tuples must have equal length")
        if self.clock < 0:
            raise ValueError("clock must be non-negative")
        if self.left.signature != self.right.signature:
            raise ValueError("structures must share a signature")
        if any(not (0 <= v < self.left.size) for v in self.left_tuple):
            raise ValueError("left tuple out of range")
        if any(not (0 <= v < self.right.size) for v in self.right_tuple):
            raise ValueError("right tuple out of range")

    def flipped(self) -> "Position":
        return Position(self.right, self.right_tuple, self.left, self.left_tuple, self.clock)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a relation query.

    ``witness`` is a refuting challenge tuple in the right structure when the
    relation fails at clock >= 1 (the full enumeration, which is dominant and
    therefore always refuting); it is None on holding verdicts and on clock-0
    failures, where no move exists to report.
    """

    holds: bool
    witness: ElementTuple | None = None


# --------------------------------------------------------------------------
# solver core


def _atoms_equal(sl: "_Side", lt: ElementTuple, sr: "_Side", rt: ElementTuple) -> bool:
    for i in range(len(lt)):
        for j in range(i + 1, len(lt)):
            if (lt[i] == lt[j]) != (rt[i] == rt[j]):
                return False
    for (name, arity) in sl.rels:
        ltab = sl.tables[name]
        rtab = sr.tables[name]
        for pos in itertools.product(range(len(lt)), repeat=arity):
            if (tuple(lt[p] for p in pos) in ltab) != (tuple(rt[p] for p in pos) in rtab):
                return False
    return True


class _Side:
    __slots__ = ("structure", "rels", "tables", "unary", "higher")

    def __init__(self, structure: Structure) -> None:
        self.structure = structure
        self.rels = tuple(structure.signature.relations)
        self.tables = {name: rows for name, rows in structure.tables}
        self.unary = [name for name, arity in self.rels if arity == 1]
        self.higher = [name for name, arity in self.rels if arity >= 2]

    def lonely_types(self) -> set[tuple[str, ...]]:
        """Unary types of elements in no higher-arity tuple at all."""
        out: set[tuple[str, ...]] = set()
        for v in range(self.structure.size):
            if any(v in row for name in self.higher for row in self.tables[name]):
                continue
            out.add(tuple(name for name in self.unary if (v,) in self.tables[name]))
        return out


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, limit: int | None) -> None:
        self.remaining = limit

    def spend(self) -> None:
        if self.remaining is not None:
            self.remaining -= 1
            if self.remaining < 0:
                raise NodeBudgetError("node budget exhausted")


class Solver:
    """Memoized decision procedure for one unordered structure pair.

    ``canonicalize_orbits`` turns on an optional pruning layer that maps memo
    keys to orbit representatives under each structure's automorphism group
    (computed only for structures of at most 8 elements); verdicts are
    unaffected, which the tests check explicitly.
    """

    def __init__(self, a: Structure, b: Structure, canonicalize_orbits: bool = False) -> None:
        self.sides = (_Side(a), _Side(b))
        self.memo: dict[tuple, bool] = {}
        self.canonicalize = canonicalize_orbits
        self._auts: tuple[list[tuple[int, ...]], ...] | None = None
        if canonicalize_orbits:
            self._auts = (_automorphisms(a), _automorphisms(b))

    def _key(self, direction: int, lt: ElementTuple, rt: ElementTuple, clock: int) -> tuple:
        if self._auts is not None:
            lt = _orbit_min(lt, self._auts[direction])
            rt = _orbit_min(rt, self._auts[1 - direction])
        return (direction, lt, rt, clock)

    def leq(
        self,
        direction: int,
        lt: ElementTuple,
        rt: ElementTuple,
        clock: int,
        budget: _Budget,
        entry: bool = True,
    ) -> bool:
        """direction 0: first structure on the left; 1: flipped."""
        left, right = self.sides[direction], self.sides[1 - direction]
        if entry and not _atoms_equal(left, lt, right, rt):
            return False
        if clock == 0:
            return True
        if not lt and not rt and clock >= 2:
            if left.lonely_types() - right.lonely_types():
                return False
        key = self._key(direction, lt, rt, clock)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = self._search(direction, lt, rt, clock, budget)
        self.memo[key] = result
        return result

    def _search(
        self, direction: int, lt: ElementTuple, rt: ElementTuple, clock: int, budget: _Budget
    ) -> bool:
        left, right = self.sides[direction], self.sides[1 - direction]
        challenge = tuple(range(right.structure.size))
        base = len(lt)
        pinned_right = rt + challenge

        domains = []
        for k in range(len(challenge)):
            dom = [
                v
                for v in range(left.structure.size)
                if self._fits_fixed(left, right, lt, pinned_right, base, k, v)
            ]
            if not dom:
                return False
            domains.append(dom)
        order = sorted(range(len(challenge)), key=lambda k: (len(domains[k]), k))
        assigned: dict[int, int] = {}

        def joint_ok(k: int, v: int) -> bool:
            new = base + k
            for j, w in assigned.items():
                if (v == w) != (pinned_right[new] == pinned_right[base + j]):
                    return False
            indices = [base + j for j in assigned] + [new]
            for (name, arity) in left.rels:
                if arity < 2:
                    continue
                ltab = left.tables[name]
                rtab = right.tables[name]
                for pos in itertools.product(indices, repeat=arity):
                    if new not in pos:
                        continue
                    row = tuple(v if p == new else assigned[p - base] for p in pos)
                    mirror = tuple(pinned_right[p] for p in pos)
                    if (row in ltab) != (mirror in rtab):
                        return False
            return True

        def descend(step: int) -> bool:
            budget.spend()
            if step == len(order):
                reply = tuple(assigned[k] for k in range(len(challenge)))
                return self.leq(
                    1 - direction, rt + challenge, lt + reply, clock - 1, budget, entry=False
                )
            k = order[step]
            for v in domains[k]:
                if joint_ok(k, v):
                    assigned[k] = v
                    if descend(step + 1):
                        return True
                    del assigned[k]
            return False

        return descend(0)

    @staticmethod
    def _fits_fixed(
        left: _Side,
        right: _Side,
        lt: ElementTuple,
        pinned_right: ElementTuple,
        base: int,
        k: int,
        v: int,
    ) -> bool:
        """Candidate v at reply position k, checked against pinned positions
        and itself only (pairwise joins with other reply positions are the
        backtracker's job)."""
        new = base + k
        for p in range(base):
            if (v == lt[p]) != (pinned_right[new] == pinned_right[p]):
                return False
        fixed = list(range(base)) + [new]
        for (name, arity) in left.rels:
            ltab = left.tables[name]
            rtab = right.tables[name]
            for pos in itertools.product(fixed, repeat=arity):
                if new not in pos:
                    continue
                row = tuple(v if p == new else lt[p] for p in pos)
                mirror = tuple(pinned_right[p] for p in pos)
                if (row in ltab) != (mirror in rtab):
                    return False
        return True

    def reply_search(
        self,
        direction: int,
        lt: ElementTuple,
        rt: ElementTuple,
        challenge: ElementTuple,
        clock: int,
        budget: _Budget,
    ) -> ElementTuple | None:
        """Lexicographically least reply to an arbitrary challenge tuple, or
        None; unlike the dominant-move search this assigns positions in tuple
        order so the first complete survivor is the lex-least one."""
        left, right = self.sides[direction], self.sides[1 - direction]
        pinned_right = rt + challenge
        base = len(lt)
        reply: list[int] = []

        def consistent(v: int) -> bool:
            new = base + len(reply)
            indices = list(range(new + 1))
            row_source = lt + tuple(reply) + (v,)
            for p in range(new):
                if (v == row_source[p]) != (pinned_right[new] == pinned_right[p]):
                    return False
            for (name, arity) in left.rels:
                ltab = left.tables[name]
                rtab = right.tables[name]
                for pos in itertools.product(indices, repeat=arity):
                    if new not in pos:
                        continue
                    row = tuple(row_source[p] for p in pos)
                    mirror = tuple(pinned_right[p] for p in pos)
                    if (row in ltab) != (mirror in rtab):
                        return False
            return True

        def descend() -> bool:
            budget.spend()
            if len(reply) == len(challenge):
                return self.leq(
                    1 - direction,
                    rt + challenge,
                    lt + tuple(reply),
                    clock - 1,
                    budget,
                    entry=False,
                )
            for v in range(left.structure.size):
                if consistent(v):
                    reply.append(v)
                    if descend():
                        return True
                    reply.pop()
            return False

        if not _atoms_equal(left, lt, right, rt):
            return None
        return tuple(reply) if descend() else None


def _automorphisms(structure: Structure, size_cap: int = 8) -> list[tuple[int, ...]]:
    """All relation-preserving-and-reflecting permutations, by backtracking;
    falls back to the identity alone past the size cap."""
    n = structure.size
    identity = tuple(range(n))
    if n > size_cap:
        return [identity]
    tables = {name: rows for name, rows in structure.tables}
    rels = structure.signature.relations
    found: list[tuple[int, ...]] = []
    image: list[int] = []

    def partial_ok(v: int) -> bool:
        new = len(image)
        assigned = list(range(new + 1))
        img = image + [v]
        for name, arity in rels:
            rows = tables[name]
            for pos in itertools.product(assigned, repeat=arity):
                if new not in pos:
                    continue
                if (pos in rows) != (tuple(img[p] for p in pos) in rows):
                    return False
        return True

    def descend(used: set[int]) -> None:
        if len(image) == n:
            found.append(tuple(image))
            return
        for v in range(n):
            if v not in used and partial_ok(v):
                image.append(v)
                used.add(v)
                descend(used)
                used.discard(v)
                image.pop()

    descend(set())
    return found or [identity]


def _orbit_min(tup: ElementTuple, auts: list[tuple[int, ...]]) -> ElementTuple:
    if len(auts) <= 1 or not tup:
        return tup
    return min(tuple(aut[v] for v in tup) for aut in auts)


_SOLVER_CACHE: dict[tuple[Structure, Structure, bool], Solver] = {}
_SOLVER_CACHE_LIMIT = 64


def _solver_for(a: Structure, b: Structure, canonicalize_orbits: bool = False) -> Solver:
    key = (a, b, canonicalize_orbits)
    alt = (b, a, canonicalize_orbits)
    solver = _SOLVER_CACHE.get(key)
    if solver is not None:
        return solver
    flipped = _SOLVER_CACHE.get(alt)
    if flipped is not None:
        return flipped
    solver = Solver(a, b, canonicalize_orbits)
    if len(_SOLVER_CACHE) >= _SOLVER_CACHE_LIMIT:
        _SOLVER_CACHE.pop(next(iter(_SOLVER_CACHE)))
    _SOLVER_CACHE[key] = solver
    return solver


def _directed(solver: Solver, left: Structure) -> int:
    return 0 if solver.sides[0].structure == left else 1


# --------------------------------------------------------------------------
# public operations


def bf_leq(
    position: Position,
    *,
    node_budget: int | None = None,
    canonicalize_orbits: bool = False,
) -> Verdict:
    solver = _solver_for(position.left, position.right, canonicalize_orbits)
    direction = _directed(solver, position.left)
    holds = solver.leq(
        direction,
        position.left_tuple,
        position.right_tuple,
        position.clock,
        _Budget(node_budget),
    )
    if holds:
        return Verdict(True)
    if position.clock == 0:
        return Verdict(False, None)
    return Verdict(False, tuple(range(position.right.size)))


def bf_geq(position: Position, *, node_budget: int | None = None) -> Verdict:
    return bf_leq(position.flipped(), node_budget=node_budget)


def bf_equiv(position: Position, *, node_budget: int | None = None) -> Verdict:
    forward = bf_leq(position, node_budget=node_budget)
    if not forward.holds:
        return forward
    backward = bf_leq(position.flipped(), node_budget=node_budget)
    if not backward.holds:
        return backward
    return Verdict(True)


def bf_rank(
    left: Structure, right: Structure, cap: int, *, node_budget: int | None = None
) -> int:
    """Largest n <= cap at which the structures are equivalent with empty
    tuples (clock 0 on empty tuples always holds, so the result is >= 0)."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    rank = 0
    for n in range(1, cap + 1):
        pos = Position(left, (), right, (), n)
        if not bf_equiv(pos, node_budget=node_budget).holds:
            break
        rank = n
    return rank


def best_reply(
    position: Position, spoiler_tuple: ElementTuple, *, node_budget: int | None = None
) -> ElementTuple | None:
    """Lex-least winning reply to the challenge, or None when none exists.

    Unlike :func:`duplicator_reply` this makes no demand that the position
    hold: a badly chosen challenge on a failing position may still be
    answerable, and a well chosen one is not.
    """
    if position.clock < 1:
        raise GameContractError("no rounds remain")
    if any(not (0 <= v < position.right.size) for v in spoiler_tuple):
        raise GameContractError("challenge tuple out of range")
    solver = _solver_for(position.left, position.right)
    direction = _directed(solver, position.left)
    budget = _Budget(node_budget)
    return solver.reply_search(
        direction,
        position.left_tuple,
        position.right_tuple,
        tuple(spoiler_tuple),
        position.clock,
        budget,
    )


def duplicator_reply(
    position: Position, spoiler_tuple: ElementTuple, *, node_budget: int | None = None
) -> ElementTuple:
    """Lex-least reply to a challenge in the right structure, valid at
    clock - 1 with sides swapped; the position must hold at clock >= 1."""
    if position.clock < 1:
        raise GameContractError("no rounds remain")
    if any(not (0 <= v < position.right.size) for v in spoiler_tuple):
        raise GameContractError("challenge tuple out of range")
    solver = _solver_for(position.left, position.right)
    direction = _directed(solver, position.left)
    budget = _Budget(node_budget)
    if not solver.leq(
        direction, position.left_tuple, position.right_tuple, position.clock, budget
    ):
        raise GameContractError("position does not hold; no guaranteed reply exists")
    reply = solver.reply_search(
        direction,
        position.left_tuple,
        position.right_tuple,
        tuple(spoiler_tuple),
        position.clock,
        budget,
    )
    if reply is None:
        raise GameContractError("holding position yielded no reply; solver defect")
    return reply


def spoiler_witness(position: Position, *, node_budget: int | None = None) -> ElementTuple:
    """Shortest (then lex-least) duplicate-free unanswerable challenge in the
    right structure; the position must fail at clock >= 1.

    Duplicate-free suffices: a duplicating challenge is answered exactly when
    its duplicate-free support is, by replaying the position map on replies.
    """
    if position.clock < 1:
        raise GameContractError("no rounds remain")
    solver = _solver_for(position.left, position.right)
    direction = _directed(solver, position.left)
    budget = _Budget(node_budget)
    if solver.leq(
        direction, position.left_tuple, position.right_tuple, position.clock, budget
    ):
        raise GameContractError("position holds; no witness exists")
    for length in range(position.right.size + 1):
        for challenge in itertools.permutations(range(position.right.size), length):
            reply = solver.reply_search(
                direction,
                position.left_tuple,
                position.right_tuple,
                challenge,
                position.clock,
                budget,
            )
            if reply is None:
                return challenge
    raise AssertionError("failing position admits the dominant witness; unreachable")


def distinguishing_formula(
    position: Position,
    *,
    node_budget: int | None = None,
    disjunct_budget: int = 100_000,
) -> Formula:
    """A formula separating the sides of a failing position.

    The result is true of the left tuple, false of the right tuple, and its
    pi rank is at most the clock: at clock 0 it is an atomic-difference
    literal, and above that it universally quantifies the witness challenge
    and disjoins, over every possible reply, the negated formula separating
    the swapped sub-position.
    """
    solver = _solver_for(position.left, position.right)
    direction = _directed(solver, position.left)
    budget = _Budget(node_budget)
    if solver.leq(
        direction, position.left_tuple, position.right_tuple, position.clock, budget
    ):
        raise GameContractError("position holds; nothing to distinguish")
    cache: dict[tuple, Formula] = {}
    counter = [0]

    def var(index: int) -> str:
        return f"v{index}"

    def atomic_difference(side_l: _Side, lt: ElementTuple, side_r: _Side, rt: ElementTuple) -> Formula:
        for (name, arity) in side_l.rels:
            ltab = side_l.tables[name]
            rtab = side_r.tables[name]
            for pos in itertools.product(range(len(lt)), repeat=arity):
                on_left = tuple(lt[p] for p in pos) in ltab
                on_right = tuple(rt[p] for p in pos) in rtab
                if on_left != on_right:
                    literal = Atomic(name, tuple(var(p) for p in pos), True)
                    return literal if on_left else negate(literal)
        for i in range(len(lt)):
            for j in range(i + 1, len(lt)):
                on_left = lt[i] == lt[j]
                on_right = rt[i] == rt[j]
                if on_left != on_right:
                    literal = Atomic("=", (var(i), var(j)), True)
                    return literal if on_left else negate(literal)
        raise AssertionError("clock-0 failure without an atomic difference")

    def build(d: int, lt: ElementTuple, rt: ElementTuple, clock: int) -> Formula:
        key = (d, lt, rt, clock)
        hit = cache.get(key)
        if hit is not None:
            return hit
        left, right = solver.sides[d], solver.sides[1 - d]
        if clock == 0:
            formula = atomic_difference(left, lt, right, rt)
        else:
            challenge = _minimal_witness(solver, d, lt, rt, clock, budget)
            m = len(challenge)
            size_l = left.structure.size
            counter[0] += max(1, size_l) ** m if m else 1
            if counter[0] > disjunct_budget:
                raise FormulaBudgetError("disjunction budget exceeded")
            branches: list[Formula] = []
            for reply in itertools.product(range(size_l), repeat=m):
                sub = build(1 - d, rt + challenge, lt + reply, clock - 1)
                branches.append(negate(sub))
            if not branches:
                # no replies exist at all (empty left universe): an
                # always-false leaf, vacuously true under the quantifier
                anchor = var(len(lt))
                body: Formula = Atomic("=", (anchor, anchor), False)
            else:
                deduped = tuple(dict.fromkeys(branches))
                body = deduped[0] if len(deduped) == 1 else Or(deduped)
            if m:
                formula = Forall(tuple(var(len(lt) + k) for k in range(m)), body)
            else:
                formula = body
        cache[key] = formula
        return formula

    return build(direction, position.left_tuple, position.right_tuple, position.clock)


def _minimal_witness(
    solver: Solver,
    direction: int,
    lt: ElementTuple,
    rt: ElementTuple,
    clock: int,
    budget: _Budget,
) -> ElementTuple:
    right_size = solver.sides[1 - direction].structure.size
    for length in range(right_size + 1):
        for challenge in itertools.permutations(range(right_size), length):
            if solver.reply_search(direction, lt, rt, challenge, clock, budget) is None:
                return challenge
    raise AssertionError("failing position must have a witness")
