"""Finite relational structures and the builders used throughout the package.

Everything here is immutable: a :class:`Structure` is a frozen value (universe
``0..size-1`` plus one table per relation symbol) and every builder is a pure
function with deterministic element numbering, so structures can be shared,
hashed, and used as memo keys by the game solver.

The text format is line oriented::

    structure c2
    signature R/2
    universe 2
    rel R: (0,1)

``structure`` and ``signature`` lines may be omitted (empty signature); the
``universe`` line is mandatory.  ``#`` starts a comment.  A JSON mirror of the
same fields is provided for the HTTP service.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

ElementTuple = tuple[int, ...]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Reserved for the formula layer, where it always denotes identity; a
# structure may not declare it as an ordinary relation.
RESERVED_EQUALITY = "="


class StructureParseError(ValueError):
    """Raised on malformed structure text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SizeBudgetError(ValueError):
    """Raised when a builder would exceed its documented size budget."""


@dataclass(frozen=True)
class Signature:
    """An ordered list of (relation name, arity) pairs, purely relational."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name, arity in self.relations:
            if not IDENT_RE.match(name):
                raise ValueError(f"relation name {name!r} is not an identifier")
            if name == RESERVED_EQUALITY:
                raise ValueError("'=' is reserved and cannot be declared")
            if name in seen:
                raise ValueError(f"duplicate relation name {name!r}")
            if arity < 1:
                raise ValueError(f"relation {name!r} has arity {arity} < 1")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise KeyError(name)


@dataclass(frozen=True)
class Structure:
    """A finite relational structure over universe ``0..size-1``.

    ``tables`` is kept as a name-sorted tuple of (name, frozenset-of-tuples)
    pairs so the value is hashable; use :meth:`of` to build one from a dict
    and :meth:`table` to read a single relation back.
    """

    signature: Signature
    size: int
    tables: tuple[tuple[str, frozenset[ElementTuple]], ...]

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("universe size must be non-negative")
        names = dict(self.signature.relations)
        if [name for name, _ in self.tables] != sorted(names):
            raise ValueError("tables must list exactly the signature's relations, sorted")
        for name, table in self.tables:
            arity = names[name]
            for row in table:
                if len(row) != arity:
                    raise ValueError(f"{name}: tuple {row} has wrong arity (want {arity})")
                if any(not (0 <= v < self.size) for v in row):
                    raise ValueError(f"{name}: tuple {row} out of range for size {self.size}")

    @classmethod
    def of(
        cls,
        signature: Signature,
        size: int,
        tables: Mapping[str, Iterable[ElementTuple]] | None = None,
    ) -> "Structure":
        tables = dict(tables or {})
        unknown = set(tables) - set(signature.names)
        if unknown:
            raise ValueError(f"tables for undeclared relations: {sorted(unknown)}")
        normalized = tuple(
            (name, frozenset(tuple(row) for row in tables.get(name, ())))
            for name in sorted(signature.names)
        )
        return cls(signature, size, normalized)

    def table(self, name: str) -> frozenset[ElementTuple]:
        for rel, rows in self.tables:
            if rel == name:
                return rows
        raise KeyError(name)

    def holds(self, name: str, row: ElementTuple) -> bool:
        return row in self.table(name)


@dataclass(frozen=True)
class Family:
    """A non-empty finite family of finite subsets of ``0..universe_bound-1``."""

    sets: frozenset[frozenset[int]]
    universe_bound: int

    def __post_init__(self) -> None:
        if self.universe_bound < 1:
            raise ValueError("universe_bound must be positive")
        if not self.sets:
            raise ValueError("family must be non-empty")
        for member in self.sets:
            if any(not (0 <= k < self.universe_bound) for k in member):
                raise ValueError(f"member {sorted(member)} exceeds universe bound")

    @classmethod
    def of(cls, members: Iterable[Iterable[int]], universe_bound: int) -> "Family":
        return cls(frozenset(frozenset(m) for m in members), universe_bound)


@dataclass(frozen=True)
class ComponentSpec:
    """A disjoint-union recipe: components with multiplicities plus the name
    of the fresh equivalence relation that will tag copies."""

    parts: tuple[tuple[Structure, int], ...]
    tag_relation_name: str = "E"

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("at least one component required")
        if not IDENT_RE.match(self.tag_relation_name):
            raise ValueError(f"tag name {self.tag_relation_name!r} is not an identifier")
        base = self.parts[0][0].signature
        for component, multiplicity in self.parts:
            if component.signature != base:
                raise ValueError("all components must share one signature")
            if multiplicity < 1:
                raise ValueError("multiplicities must be positive")
        if self.tag_relation_name in base.names:
            raise ValueError(f"tag {self.tag_relation_name!r} collides with a relation")

    @property
    def signature(self) -> Signature:
        return self.parts[0][0].signature


# --------------------------------------------------------------------------
# text format


def parse_structure(text: str) -> Structure:
    """Parse the line-oriented structure format.

    Raises :class:`StructureParseError` with line/column on any malformed
    input, including arity mismatches and out-of-range elements.
    """
    signature: Signature | None = None
    size: int | None = None
    tables: dict[str, set[ElementTuple]] = {}
    seen_rel_lines: set[str] = set()

    def err(msg: str, lineno: int, col: int) -> StructureParseError:
        return StructureParseError(msg, lineno, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        col0 = len(line) - len(stripped) + 1
        head, _, rest = stripped.partition(" ")
        if head == "structure":
            if not rest.strip():
                raise err("missing structure name", lineno, col0 + len("structure "))
            continue
        if head == "signature":
            if signature is not None:
                raise err("duplicate signature line", lineno, col0)
            pairs: list[tuple[str, int]] = []
            for token in rest.split():
                name, slash, arity_text = token.partition("/")
                if not slash or not arity_text.isdigit():
                    raise err(f"bad relation declaration {token!r} (want name/arity)",
                              lineno, line.index(token) + 1)
                pairs.append((name, int(arity_text)))
            try:
                signature = Signature(tuple(pairs))
            except ValueError as exc:
                raise err(str(exc), lineno, col0) from exc
            continue
        if head == "universe":
            if size is not None:
                raise err("duplicate universe line", lineno, col0)
            if not rest.strip().isdigit():
                raise err(f"bad universe size {rest.strip()!r}", lineno,
                          col0 + len("universe "))
            size = int(rest.strip())
            continue
        if head == "rel":
            name, colon, body = rest.partition(":")
            name = name.strip()
            if not colon:
                raise err("missing ':' after relation name", lineno, col0)
            if signature is None or name not in signature.names:
                raise err(f"relation {name!r} not declared", lineno,
                          line.index(name) + 1 if name and name in line else col0)
            if name in seen_rel_lines:
                raise err(f"duplicate rel line for {name!r}", lineno, col0)
            seen_rel_lines.add(name)
            if size is None:
                raise err("rel line before universe line", lineno, col0)
            arity = signature.arity(name)
            rows: set[ElementTuple] = set()
            for match in re.finditer(r"\(([^()]*)\)|(\S+)", body):
                if match.group(2) is not None:
                    raise err(f"expected a (…) tuple, got {match.group(2)!r}",
                              lineno, line.index(body) + match.start() + 1)
                col = line.rindex(body) + match.start() + 1
                entries = [t.strip() for t in match.group(1).split(",")] if match.group(1).strip() else []
                if any(not t.isdigit() for t in entries):
                    raise err(f"bad tuple ({match.group(1)})", lineno, col)
                row = tuple(int(t) for t in entries)
                if len(row) != arity:
                    raise err(f"tuple {row} has arity {len(row)}, {name!r} wants {arity}",
                              lineno, col)
                if any(v >= size for v in row):
                    raise err(f"element out of range in {row} (universe {size})",
                              lineno, col)
                rows.add(row)
            tables[name] = rows
            continue
        raise err(f"unknown directive {head!r}", lineno, col0)

    if size is None:
        raise StructureParseError("missing universe line", max(1, text.count("\n") + 1), 1)
    return Structure.of(signature or Signature(()), size, tables)


def serialize_structure(structure: Structure, name: str = "s") -> str:
    lines = [f"structure {name}"]
    if structure.signature.relations:
        decls = " ".join(f"{rel}/{arity}" for rel, arity in structure.signature.relations)
        lines.append(f"signature {decls}")
    lines.append(f"universe {structure.size}")
    for rel, rows in structure.tables:
        if rows:
            body = " ".join("(" + ",".join(map(str, row)) + ")" for row in sorted(rows))
            lines.append(f"rel {rel}: {body}")
    return "\n".join(lines) + "\n"


def structure_to_json(structure: Structure) -> dict:
    return {
        "signature": [[name, arity] for name, arity in structure.signature.relations],
        "universe": structure.size,
        "relations": {name: sorted(map(list, rows)) for name, rows in structure.tables if rows},
    }


def structure_from_json(payload: Mapping) -> Structure:
    try:
        signature = Signature(tuple((str(n), int(a)) for n, a in payload["signature"]))
        size = int(payload["universe"])
        tables = {
            str(name): [tuple(int(v) for v in row) for row in rows]
            for name, rows in dict(payload.get("relations", {})).items()
        }
        return Structure.of(signature, size, tables)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad structure payload: {exc}") from exc


# --------------------------------------------------------------------------
# builders


def build_linear_order(size: int) -> Structure:
    """Strict total order on ``0..size-1``; the relation is named ``lt``."""
    signature = Signature((("lt", 2),))
    pairs = {(i, j) for i in range(size) for j in range(size) if i < j}
    return Structure.of(signature, size, {"lt": pairs})


def disjoint_union(spec: ComponentSpec) -> Structure:
    """Tagged disjoint union: parts in listed order, copies consecutive,
    plus a fresh equivalence relation holding exactly within each copy."""
    base = spec.signature
    signature = Signature(base.relations + ((spec.tag_relation_name, 2),))
    tables: dict[str, set[ElementTuple]] = {name: set() for name in signature.names}
    offset = 0
    for component, multiplicity in spec.parts:
        for _ in range(multiplicity):
            for name, rows in component.tables:
                for row in rows:
                    tables[name].add(tuple(v + offset for v in row))
            block = range(offset, offset + component.size)
            tables[spec.tag_relation_name].update((x, y) for x in block for y in block)
            offset += component.size
    return Structure.of(signature, offset, tables)


def union_components(structure: Structure, tag: str = "E") -> list[list[int]]:
    """The classes of a tagged union's equivalence relation, as sorted
    element lists in first-element order (elements outside every tagged pair
    count as singletons)."""
    table = structure.table(tag)
    classes: list[list[int]] = []
    assigned: set[int] = set()
    for x in range(structure.size):
        if x in assigned:
            continue
        mates = sorted({y for (u, y) in table if u == x} | {x})
        assigned.update(mates)
        classes.append(mates)
    return classes


def build_flower_graph(family: Family, copies: int) -> Structure:
    """Encode a family as a simple graph: one component per (member, copy),
    each a central vertex with one cycle per set element.

    Element ``k`` becomes a cycle of length ``k + 3`` through the center (the
    shift makes every natural number encodable as a simple cycle); the empty
    set becomes a bare central vertex.  Components are numbered in canonical
    member order (members sorted as tuples), copies consecutive; within a
    component the center comes first, then each cycle's fresh vertices in
    path order.  The single binary relation ``adj`` is symmetric and
    irreflexive.
    """
    if copies < 1:
        raise ValueError("copies must be positive")
    signature = Signature((("adj", 2),))
    edges: set[ElementTuple] = set()
    counter = 0
    members = sorted(family.sets, key=lambda member: tuple(sorted(member)))
    for member in members:
        for _ in range(copies):
            center = counter
            counter += 1
            for k in sorted(member):
                path = list(range(counter, counter + k + 2))
                counter += k + 2
                cycle = [center, *path, center]
                for u, v in zip(cycle, cycle[1:]):
                    edges.add((u, v))
                    edges.add((v, u))
    return Structure.of(signature, counter, {"adj": edges})


def close_family(family: Family) -> Family:
    """Close under adding arbitrary subsets of the bounded universe."""
    universe = range(family.universe_bound)
    closed = {
        member | frozenset(extra)
        for member in family.sets
        for r in range(family.universe_bound + 1)
        for extra in itertools.combinations(universe, r)
    }
    return Family(frozenset(closed), family.universe_bound)


def _table_bounds(
    table: Mapping[tuple[int, int, int], bool],
    bounds: tuple[int, int, int] | None,
) -> tuple[int, int, int]:
    if bounds is not None:
        return bounds
    if not table:
        raise ValueError("empty table and no explicit bounds")
    keys = list(table)
    return (
        1 + max(key[0] for key in keys),
        1 + max(key[1] for key in keys),
        1 + max(key[2] for key in keys),
    )


def build_lemma21_pair(
    n: int,
    table: Mapping[tuple[int, int, int], bool],
    i: int,
    truncation: int,
    bounds: tuple[int, int, int] | None = None,
) -> tuple[Structure, Structure]:
    """Build the paired structures whose one-way relations encode a boolean
    table row, at depth ``n`` in ``{2, 3}``.

    ``table`` maps ``(i', m, j)`` to a boolean (missing cells read as false;
    ``bounds`` may widen the index ranges beyond the listed keys).  ``i`` is
    the designated row index and ``truncation`` replaces every unbounded
    replication in the underlying recipe.

    Depth 2 produces unary-tagged point clouds: the first structure carries
    ``truncation`` points per true cell plus one absorption point per
    satisfied designated row, the second the same grid plus one marker point
    per ``m`` regardless of satisfaction.  Depth 3 wraps depth-2 gadgets in
    an equivalence relation ``E3`` with unary sort tags.

    Raises :class:`SizeBudgetError` when the output would exceed roughly 200
    elements per structure.
    """
    if n not in (2, 3):
        raise ValueError("depth must be 2 or 3")
    if truncation < 1:
        raise ValueError("truncation must be positive")
    bound_i, bound_m, bound_j = _table_bounds(table, bounds)
    if not (0 <= i < bound_i):
        raise ValueError(f"designated row {i} outside bound {bound_i}")

    def cell(ii: int, mm: int, jj: int) -> bool:
        return bool(table.get((ii, mm, jj), False))

    if n == 2:
        return _lemma21_base(cell, i, truncation, bound_i, bound_m, bound_j)
    return _lemma21_step(cell, i, truncation, bound_i, bound_m, bound_j)


def _lemma21_base(cell, i_des, truncation, bound_i, bound_m, bound_j):
    names = sorted(f"R2_{ii}_{mm}" for ii in range(bound_i) for mm in range(bound_m))
    signature = Signature(tuple((name, 1) for name in names))
    grid_size = bound_i * bound_m * bound_j * truncation
    if grid_size + bound_m > 200:
        raise SizeBudgetError("size budget exceeded")

    def tag_sets(extra_marks: list[str]) -> Structure:
        tags: list[str | None] = []
        for ii in range(bound_i):
            for mm in range(bound_m):
                for jj in range(bound_j):
                    for _ in range(truncation):
                        tags.append(f"R2_{ii}_{mm}" if cell(ii, mm, jj) else None)
        tags.extend(extra_marks)
        tables = {
            name: {(e,) for e, tag in enumerate(tags) if tag == name} for name in names
        }
        return Structure.of(signature, len(tags), tables)

    absorbed = [
        f"R2_{i_des}_{mm}"
        for mm in range(bound_m)
        if any(cell(i_des, mm, jj) for jj in range(bound_j))
    ]
    markers = [f"R2_{i_des}_{mm}" for mm in range(bound_m)]
    return tag_sets(absorbed), tag_sets(markers)


def _lemma21_step(cell, i_des, truncation, bound_i, bound_m, bound_j):
    """One inductive layer: per sort (i', m), an inner depth-2 gadget family
    over the inner table ``T(j, 0, 0) = U(i', m, j)``; the designated-side
    structure additionally receives copies of the inner first component."""
    sort_names = sorted(f"R3_{ii}_{mm}" for ii in range(bound_i) for mm in range(bound_m))
    inner_names_all: set[str] = set()
    inner_cache: dict[tuple[int, int], tuple[Structure, list[Structure]]] = {}
    for ii in range(bound_i):
        for mm in range(bound_m):
            inner_table = {
                (jj, 0, 0): cell(ii, mm, jj) for jj in range(bound_j)
            }
            inner_a, _ = build_lemma21_pair(2, inner_table, 0, truncation,
                                            bounds=(bound_j, 1, 1))
            inner_bs = [
                build_lemma21_pair(2, inner_table, jj, truncation,
                                   bounds=(bound_j, 1, 1))[1]
                for jj in range(bound_j)
            ]
            inner_cache[(ii, mm)] = (inner_a, inner_bs)
            inner_names_all.update(inner_a.signature.names)

    signature = Signature(
        tuple((name, 1) for name in sorted(inner_names_all))
        + tuple((name, 1) for name in sort_names)
        + (("E3", 2),)
    )

    def assemble(extra_inner_a: bool) -> Structure:
        tables: dict[str, set[ElementTuple]] = {name: set() for name in signature.names}
        offset = 0

        def place(block: Structure, sort_tag: str) -> None:
            nonlocal offset
            for name, rows in block.tables:
                tables[name].update(tuple(v + offset for v in row) for row in rows)
            span = range(offset, offset + block.size)
            tables[sort_tag].update((v,) for v in span)
            tables["E3"].update((x, y) for x in span for y in span)
            offset += block.size

        for ii in range(bound_i):
            for mm in range(bound_m):
                inner_a, inner_bs = inner_cache[(ii, mm)]
                tag = f"R3_{ii}_{mm}"
                for inner_b in inner_bs:
                    for _ in range(truncation):
                        place(inner_b, tag)
                if extra_inner_a and ii == i_des:
                    for _ in range(truncation):
                        place(inner_a, tag)
        if offset > 200:
            raise SizeBudgetError("size budget exceeded")
        return Structure.of(signature, offset, tables)

    return assemble(False), assemble(True)
