"""Formula ASTs in negation normal form, evaluation, and rank classification.

The node kinds are ``Atomic`` (with a polarity bit, so negation lives only at
the leaves), ``And``/``Or`` over non-empty finite child lists, and
``Exists``/``Forall`` over non-empty variable lists.  Finite index sets stand
in for the countable conjunctions and disjunctions of the ambient theory; a
synthesized formula's semantic guarantee is always relative to the explicit
bounds it was built with.

The relation name ``=`` is reserved: structures cannot declare it, and the
evaluator always reads it as identity of elements.  It exists so callers can
write always-true and always-false leaves, e.g. ``(rel = x x)`` and
``(not (rel = x x))``; the random generator never emits it.

Rank conventions (all six ranks are computed by one structural recursion):

* quantifier-free formulas have sigma = pi = 0 and all four game ranks 1;
* the sigma/pi pair counts every quantifier alternation, so a conjunction
  whose children are of sigma rank k classifies at pi rank k and sigma rank
  k + 1 (dually for disjunctions of pi-ranked children);
* the e/a pair instead lets positive boolean structure come for free: the
  ebar/abar ranks close e/a under conjunction and disjunction, existential
  quantification keeps e rank, and each genuine alternation steps through
  the opposite closed class (a of a node that is neither universal nor a
  conjunction is its ebar plus one, and symmetrically).
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .structures import RESERVED_EQUALITY, Structure

VAR_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FormulaParseError(ValueError):
    """Malformed formula text; carries the character offset."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class EvalError(ValueError):
    """Evaluation failed: unbound variable, unknown relation, or bad arity."""


class UnreachableClassError(ValueError):
    """The generator could not hit the requested class within its bounds."""


@dataclass(frozen=True)
class Atomic:
    relation: str
    variables: tuple[str, ...]
    polarity: bool = True

    def __post_init__(self) -> None:
        if self.relation != "=" and not VAR_RE.match(self.relation):
            raise ValueError(f"bad relation name {self.relation!r}")
        if self.relation == "=" and len(self.variables) != 2:
            raise ValueError("'=' takes exactly two variables")
        if not self.variables:
            raise ValueError("atomic formula needs at least one variable")
        for v in self.variables:
            if not VAR_RE.match(v):
                raise ValueError(f"bad variable name {v!r}")


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("empty conjunction")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("empty disjunction")


def _check_binder(variables: tuple[str, ...]) -> None:
    if not variables:
        raise ValueError("quantifier needs at least one variable")
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable in one quantifier")
    for v in variables:
        if not VAR_RE.match(v):
            raise ValueError(f"bad variable name {v!r}")


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: "Formula"

    def __post_init__(self) -> None:
        _check_binder(self.variables)


@dataclass(frozen=True)
class Forall:
    variables: tuple[str, ...]
    body: "Formula"

    def __post_init__(self) -> None:
        _check_binder(self.variables)


Formula = Union[Atomic, And, Or, Exists, Forall]


def make_and(children: Iterable[Formula]) -> Formula:
    """Deduplicated conjunction; collapses singletons, rejects emptiness."""
    kept = tuple(dict.fromkeys(children))
    if not kept:
        raise ValueError("empty conjunction")
    return kept[0] if len(kept) == 1 else And(kept)


def make_or(children: Iterable[Formula]) -> Formula:
    kept = tuple(dict.fromkeys(children))
    if not kept:
        raise ValueError("empty disjunction")
    return kept[0] if len(kept) == 1 else Or(kept)


def true_leaf(variable: str = "x") -> Formula:
    return Atomic("=", (variable, variable), True)


def false_leaf(variable: str = "x") -> Formula:
    return Atomic("=", (variable, variable), False)


def free_variables(formula: Formula) -> frozenset[str]:
    if isinstance(formula, Atomic):
        return frozenset(formula.variables)
    if isinstance(formula, (And, Or)):
        out: frozenset[str] = frozenset()
        for child in formula.children:
            out |= free_variables(child)
        return out
    return free_variables(formula.body) - frozenset(formula.variables)


def negate(formula: Formula) -> Formula:
    """Negation-normal-form negation; an involution on this AST."""
    if isinstance(formula, Atomic):
        return Atomic(formula.relation, formula.variables, not formula.polarity)
    if isinstance(formula, And):
        return Or(tuple(negate(c) for c in formula.children))
    if isinstance(formula, Or):
        return And(tuple(negate(c) for c in formula.children))
    if isinstance(formula, Exists):
        return Forall(formula.variables, negate(formula.body))
    return Exists(formula.variables, negate(formula.body))


def _all_names(formula: Formula) -> Iterable[str]:
    if isinstance(formula, Atomic):
        yield from formula.variables
    elif isinstance(formula, (And, Or)):
        for child in formula.children:
            yield from _all_names(child)
    else:
        yield from formula.variables
        yield from _all_names(formula.body)


def substitute(formula: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variables, alpha-renaming binders to avoid capture.

    Bound occurrences shadow mapping keys as usual, and a binder whose name
    collides with an incoming target is itself renamed to a fresh name, so
    the result always evaluates the way the renamed original would.
    """
    live = {k: v for k, v in mapping.items() if k != v}
    if not live:
        return formula
    used = set(_all_names(formula)) | set(live) | set(live.values())

    def fresh(base: str) -> str:
        n = 0
        while f"{base}_{n}" in used:
            n += 1
        used.add(f"{base}_{n}")
        return f"{base}_{n}"

    def walk(node: Formula, env: dict[str, str]) -> Formula:
        if isinstance(node, Atomic):
            return Atomic(
                node.relation,
                tuple(env.get(v, v) for v in node.variables),
                node.polarity,
            )
        if isinstance(node, (And, Or)):
            kids = tuple(walk(c, env) for c in node.children)
            return And(kids) if isinstance(node, And) else Or(kids)
        inner = {k: v for k, v in env.items() if k not in node.variables}
        targets = set(inner.values())
        bound = []
        for name in node.variables:
            if name in targets:
                renamed = fresh(name)
                inner[name] = renamed
                bound.append(renamed)
            else:
                bound.append(name)
        body = walk(node.body, inner)
        if isinstance(node, Exists):
            return Exists(tuple(bound), body)
        return Forall(tuple(bound), body)

    return walk(formula, live)


# --------------------------------------------------------------------------
# evaluation


def eval_formula(
    formula: Formula, structure: Structure, assignment: Mapping[str, int] | None = None
) -> bool:
    """Standard satisfaction over the finite universe.

    Sub-results are memoized per (shared subformula, values of its free
    variables), which is what makes the large synthesized type formulas
    evaluable; on small inputs it behaves like the plain recursion.
    """
    assignment = dict(assignment or {})
    tables = {name: rows for name, rows in structure.tables}
    arities = dict(structure.signature.relations)
    free_cache: dict[int, frozenset[str]] = {}
    memo: dict[tuple[int, tuple[tuple[str, int], ...]], bool] = {}

    def free_of(node: Formula) -> frozenset[str]:
        got = free_cache.get(id(node))
        if got is None:
            got = free_variables(node)
            free_cache[id(node)] = got
        return got

    def run(node: Formula, env: dict[str, int]) -> bool:
        key = (id(node), tuple(sorted((v, env[v]) for v in free_of(node) if v in env)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        result = _run(node, env)
        memo[key] = result
        return result

    def _run(node: Formula, env: dict[str, int]) -> bool:
        if isinstance(node, Atomic):
            try:
                values = tuple(env[v] for v in node.variables)
            except KeyError as exc:
                raise EvalError(f"unbound variable {exc.args[0]!r}") from exc
            if node.relation == "=":
                holds = values[0] == values[1]
            else:
                if node.relation not in tables:
                    raise EvalError(f"unknown relation {node.relation!r}")
                if len(values) != arities[node.relation]:
                    raise EvalError(
                        f"relation {node.relation!r} wants arity "
                        f"{arities[node.relation]}, got {len(values)}"
                    )
                holds = values in tables[node.relation]
            return holds if node.polarity else not holds
        if isinstance(node, And):
            return all(run(child, env) for child in node.children)
        if isinstance(node, Or):
            return any(run(child, env) for child in node.children)
        if isinstance(node, Exists):
            return any(
                run(node.body, {**env, **dict(zip(node.variables, vals))})
                for vals in _tuples(structure.size, len(node.variables))
            )
        return all(
            run(node.body, {**env, **dict(zip(node.variables, vals))})
            for vals in _tuples(structure.size, len(node.variables))
        )

    # fail fast on free variables the assignment does not cover
    missing = free_of(formula) - set(assignment)
    if missing:
        raise EvalError(f"unbound variable {sorted(missing)[0]!r}")
    return run(formula, assignment)


def _tuples(size: int, length: int):
    return itertools.product(range(size), repeat=length)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ComplexityReport:
    sigma_rank: int
    pi_rank: int
    e_rank: int
    a_rank: int
    ebar_rank: int
    abar_rank: int

    def as_dict(self) -> dict[str, int]:
        return {
            "sigma_rank": self.sigma_rank,
            "pi_rank": self.pi_rank,
            "e_rank": self.e_rank,
            "a_rank": self.a_rank,
            "ebar_rank": self.ebar_rank,
            "abar_rank": self.abar_rank,
        }


_QF_REPORT = ComplexityReport(0, 0, 1, 1, 1, 1)


def is_quantifier_free(formula: Formula) -> bool:
    if isinstance(formula, Atomic):
        return True
    if isinstance(formula, (And, Or)):
        return all(is_quantifier_free(c) for c in formula.children)
    return False


def classify(formula: Formula) -> ComplexityReport:
    """Least membership ranks in all six hierarchies, by one recursion."""
    memo: dict[int, ComplexityReport] = {}

    def walk(node: Formula) -> ComplexityReport:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        report = _classify_node(node, walk)
        memo[id(node)] = report
        return report

    return walk(formula)


def _classify_node(node: Formula, walk) -> ComplexityReport:
    if isinstance(node, Atomic):
        return _QF_REPORT
    if isinstance(node, (And, Or)):
        parts = [walk(c) for c in node.children]
        if all(p is _QF_REPORT or p == _QF_REPORT for p in parts):
            return _QF_REPORT
        ebar = max(1, max(p.ebar_rank for p in parts))
        abar = max(1, max(p.abar_rank for p in parts))
        if isinstance(node, Or):
            sigma = max(p.sigma_rank for p in parts)
            e = max(1, max(p.e_rank for p in parts))
            return ComplexityReport(sigma, sigma + 1, e, ebar + 1, ebar, abar)
        pi = max(p.pi_rank for p in parts)
        a = max(1, max(p.a_rank for p in parts))
        return ComplexityReport(pi + 1, pi, abar + 1, a, ebar, abar)
    inner = walk(node.body)
    if isinstance(node, Exists):
        sigma = max(1, inner.sigma_rank)
        e = max(1, inner.e_rank)
        return ComplexityReport(sigma, sigma + 1, e, e + 1, e, e + 1)
    pi = max(1, inner.pi_rank)
    a = max(1, inner.a_rank)
    return ComplexityReport(pi + 1, pi, a + 1, a, a + 1, a)


# --------------------------------------------------------------------------
# text format


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str) -> Formula:
    """Parse the s-expression grammar:

    ``(rel R x y)`` | ``(not (rel R x y))`` | ``(and f ...)`` | ``(or f ...)``
    | ``(exists (x y) f)`` | ``(forall (x) f)``

    ``not`` is only accepted directly around a ``rel`` form, matching the
    negation-normal-form invariant of the AST.
    """
    tokens = [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(text)]
    pos = 0

    def err(msg: str, at: int | None = None) -> FormulaParseError:
        offset = tokens[at][1] if at is not None and at < len(tokens) else len(text)
        return FormulaParseError(msg, offset)

    def expect(token: str) -> None:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != token:
            raise err(f"expected {token!r}", pos)
        pos += 1

    def next_word() -> str:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] in "()":
            raise err("expected a name", pos)
        word = tokens[pos][0]
        pos += 1
        return word

    def parse_vars() -> tuple[str, ...]:
        nonlocal pos
        expect("(")
        names: list[str] = []
        while pos < len(tokens) and tokens[pos][0] != ")":
            names.append(next_word())
        expect(")")
        return tuple(names)

    def parse_node() -> Formula:
        nonlocal pos
        expect("(")
        head = next_word()
        try:
            if head == "rel":
                name = next_word()
                names: list[str] = []
                while pos < len(tokens) and tokens[pos][0] != ")":
                    names.append(next_word())
                expect(")")
                return Atomic(name, tuple(names), True)
            if head == "not":
                inner = parse_node()
                if not isinstance(inner, Atomic) or not inner.polarity:
                    raise err("'not' may only wrap a rel form", pos - 1)
                expect(")")
                return Atomic(inner.relation, inner.variables, False)
            if head in ("and", "or"):
                children: list[Formula] = []
                while pos < len(tokens) and tokens[pos][0] != ")":
                    children.append(parse_node())
                expect(")")
                return And(tuple(children)) if head == "and" else Or(tuple(children))
            if head in ("exists", "forall"):
                variables = parse_vars()
                body = parse_node()
                expect(")")
                return Exists(variables, body) if head == "exists" else Forall(variables, body)
        except ValueError as exc:
            if isinstance(exc, FormulaParseError):
                raise
            raise err(str(exc), pos - 1) from exc
        raise err(f"unknown form {head!r}", pos - 1)

    node = parse_node()
    if pos != len(tokens):
        raise err("trailing input", pos)
    return node


def serialize_formula(formula: Formula) -> str:
    if isinstance(formula, Atomic):
        core = f"(rel {formula.relation} {' '.join(formula.variables)})"
        return core if formula.polarity else f"(not {core})"
    if isinstance(formula, (And, Or)):
        head = "and" if isinstance(formula, And) else "or"
        return f"({head} {' '.join(serialize_formula(c) for c in formula.children)})"
    head = "exists" if isinstance(formula, Exists) else "forall"
    return f"({head} ({' '.join(formula.variables)}) {serialize_formula(formula.body)})"


# --------------------------------------------------------------------------
# random generation


_CLASS_FIELDS = {
    "sigma": "sigma_rank",
    "pi": "pi_rank",
    "e": "e_rank",
    "a": "a_rank",
    "ebar": "ebar_rank",
    "abar": "abar_rank",
}


def random_formula(
    seed: int,
    *,
    relations: tuple[tuple[str, int], ...] = (("R", 2),),
    variables: tuple[str, ...] = ("x0", "x1"),
    max_depth: int = 5,
    max_children: int = 3,
    target_class: str | None = None,
    target_rank: int | None = None,
    attempts: int = 2000,
) -> Formula:
    """Reproducible random NNF formula, optionally inside a named class.

    With ``target_class``/``target_rank`` set, draws are rejected until the
    classifier places the result inside the class (rank at most
    ``target_rank``); raises :class:`UnreachableClassError` if the bounds
    never produce one.  Identical arguments give identical results.
    """
    if (target_class is None) != (target_rank is None):
        raise ValueError("target_class and target_rank go together")
    if target_class is not None and target_class not in _CLASS_FIELDS:
        raise ValueError(f"unknown class {target_class!r}")
    if any(name == RESERVED_EQUALITY for name, _ in relations):
        raise ValueError("generated formulas never use the equality relation")
    rng = random.Random(seed)
    fresh = [0]

    def draw(depth: int, scope: tuple[str, ...]) -> Formula:
        leaf_bias = 0.25 + 0.75 * (depth / max_depth)
        if scope and rng.random() < leaf_bias:
            name, arity = relations[rng.randrange(len(relations))]
            chosen = tuple(scope[rng.randrange(len(scope))] for _ in range(arity))
            return Atomic(name, chosen, rng.random() < 0.5)
        kind = rng.choice(("and", "or", "exists", "forall"))
        if kind in ("and", "or") and scope:
            count = rng.randint(1, max_children)
            children = tuple(draw(depth + 1, scope) for _ in range(count))
            return And(children) if kind == "and" else Or(children)
        width = rng.randint(1, 2)
        bound = []
        for _ in range(width):
            bound.append(f"q{fresh[0]}")
            fresh[0] += 1
        body = draw(depth + 1, scope + tuple(bound))
        return Exists(tuple(bound), body) if kind == "exists" else Forall(tuple(bound), body)

    for _ in range(attempts):
        fresh[0] = 0
        candidate = draw(0, variables)
        if target_class is None:
            return candidate
        rank = getattr(classify(candidate), _CLASS_FIELDS[target_class])
        if rank <= target_rank:
            return candidate
    raise UnreachableClassError(
        f"no {target_class}-{target_rank} formula within bounds after {attempts} draws"
    )
