"""Synthesis of formulas that pin down game-theoretic types.

Everything in this module produces ordinary ASTs from :mod:`.formulas`; the
interest is in what they mean.  For a finite reference structure ``m`` with a
pinned tuple ``a`` and a clock ``n``, :func:`canonical_type_formulas` builds a
pair ``(phi, psi)`` such that, evaluated on any structure ``N`` of size at
most the tuple bound with a same-length tuple ``b``,

* ``psi`` holds exactly when ``(m, a)`` relates forward to ``(N, b)`` at
  clock ``n`` (the engine's ``bf_leq``), and
* ``phi`` holds exactly when ``(m, a)`` relates backward, i.e. ``bf_geq``.

Free variables follow the positional convention shared with the engine's
distinguishing formulas: position ``p`` of the pinned tuple is the variable
``v{p}``, and quantifiers introduced below a tuple of length ``k`` bind
``v{k}``, ``v{k+1}`` and so on, which keeps every synthesized formula
capture-free by construction.

The remaining operations are smaller appliances built from the same parts:
one-clock comparison sentences against a fixed reference structure, a
universal formula isolating the dominance type of a tuple, and a conversion
of low existential-rank formulas to plain existential shape that preserves
truth inside one fixed structure.
"""

from __future__ import annotations

import itertools

from .bfgame import FormulaBudgetError, Position, bf_leq, distinguishing_formula
from .formulas import (
    Atomic,
    Exists,
    Forall,
    Formula,
    classify,
    eval_formula,
    false_leaf,
    free_variables,
    make_and,
    make_or,
    substitute,
    true_leaf,
)
from .structures import Structure


class RankBoundError(ValueError):
    """Input formula's classified rank exceeds what the operation allows."""


def _var(position: int) -> str:
    return f"v{position}"


def atomic_type_formula(structure: Structure, pinned: tuple[int, ...]) -> Formula:
    """Quantifier-free description of every atom over the pinned tuple.

    One literal per relation and position tuple, plus one equality literal
    per position pair, each with the polarity the structure realizes.  With
    no literals to state (an empty or singleton pinned tuple over an
    atom-free signature) the constant-true formula comes back.
    """
    body = _theta(structure, pinned)
    if body is not None:
        return body
    if pinned:
        return true_leaf(_var(0))
    return Forall((_var(0),), true_leaf(_var(0)))


def _theta(structure: Structure, pinned: tuple[int, ...]) -> Formula | None:
    """Atomic diagram of ``pinned``, or None when it has no literals.

    Equality literals between distinct positions are part of the diagram:
    the game's type comparison tracks which entries coincide, so the
    formulas must pin the same pattern.
    """
    literals: list[Formula] = []
    k = len(pinned)
    for name, arity in structure.signature.relations:
        for places in itertools.product(range(k), repeat=arity):
            row = tuple(pinned[p] for p in places)
            literals.append(
                Atomic(name, tuple(_var(p) for p in places), structure.holds(name, row))
            )
    for i in range(k):
        for j in range(i + 1, k):
            literals.append(Atomic("=", (_var(i), _var(j)), pinned[i] == pinned[j]))
    return make_and(literals) if literals else None


def canonical_type_formulas(
    m: Structure,
    a: tuple[int, ...],
    n: int,
    *,
    tuple_bound: int = 4,
) -> tuple[Formula, Formula]:
    """Build the backward/forward type formulas of ``(m, a)`` at clock ``n``.

    Returns ``(phi, psi)``.  Evaluated on ``(N, b)`` with ``len(b) == len(a)``
    and ``N.size <= tuple_bound``, ``psi`` agrees with the forward relation
    query and ``phi`` with the backward one.  The bound controls how many
    quantified positions each layer introduces; it is the size ceiling on the
    structures the output is valid for, because a challenge enumerating the
    whole opposing universe is the strongest one and fits inside the bound
    exactly when that universe does.

    ``phi`` stays within existential-over-conjunction shape at depth ``n``
    (classified ebar rank at most ``max(1, n)``); ``psi`` stays within the
    universal analogue (a rank at most ``max(1, n)``).
    """
    if any(not (0 <= x < m.size) for x in a):
        raise ValueError("pinned tuple out of range")
    if n < 0:
        raise ValueError("clock must be non-negative")
    if tuple_bound < 1:
        raise ValueError("tuple bound must be at least 1")
    if n > 3:
        raise FormulaBudgetError("clock beyond the supported synthesis depth")
    if max(m.size, 1) ** tuple_bound > 100_000:
        raise FormulaBudgetError("reply enumeration too large for synthesis")

    memo: dict[tuple[str, tuple[int, ...], int], Formula | None] = {}

    def phi(pinned: tuple[int, ...], clock: int) -> Formula | None:
        key = ("phi", pinned, clock)
        if key in memo:
            return memo[key]
        if clock == 0:
            out = _theta(m, pinned)
        else:
            conjuncts: list[Formula] = []
            offset = len(pinned)
            for k in range(0, min(tuple_bound, m.size) + 1):
                ys = tuple(_var(offset + i) for i in range(k))
                for moves in itertools.permutations(range(m.size), k):
                    inner = psi(pinned + moves, clock - 1)
                    if k == 0:
                        if inner is not None:
                            conjuncts.append(inner)
                    elif inner is None:
                        # An existential over a true body still asserts the
                        # quantified positions can be filled at all.
                        conjuncts.append(Exists(ys, true_leaf(ys[0])))
                    else:
                        conjuncts.append(Exists(ys, inner))
            out = make_and(conjuncts) if conjuncts else None
        memo[key] = out
        return out

    def psi(pinned: tuple[int, ...], clock: int) -> Formula | None:
        key = ("psi", pinned, clock)
        if key in memo:
            return memo[key]
        if clock == 0:
            out = _theta(m, pinned)
        else:
            conjuncts = []
            base = phi(pinned, clock - 1)
            if base is not None:
                conjuncts.append(base)
            offset = len(pinned)
            for width in range(1, tuple_bound + 1):
                ys = tuple(_var(offset + i) for i in range(width))
                branches: list[Formula] = []
                vacuous = False
                for replies in itertools.product(range(m.size), repeat=width):
                    inner = phi(pinned + replies, clock - 1)
                    if inner is None:
                        vacuous = True
                        break
                    branches.append(inner)
                if vacuous:
                    continue
                if branches:
                    conjuncts.append(Forall(ys, make_or(branches)))
                else:
                    conjuncts.append(Forall(ys, false_leaf(ys[0])))
            out = make_and(conjuncts) if conjuncts else None
        memo[key] = out
        return out

    def finish(built: Formula | None, universal_true: bool) -> Formula:
        if built is not None:
            return built
        if a:
            return true_leaf(_var(0))
        if universal_true:
            return Forall((_var(0),), true_leaf(_var(0)))
        return Exists((_var(0),), true_leaf(_var(0)))

    return finish(phi(a, n), universal_true=False), finish(psi(a, n), universal_true=True)


def synth_geq1_sentence(m: Structure, depth_bound: int) -> Formula:
    """Universal sentence meaning "relates backward to ``m`` at clock 1".

    Holds in ``N`` exactly when every challenge tuple of ``N`` has an
    atomic-type twin in ``m``, which for structures of size at most
    ``depth_bound`` is the whole backward relation at clock 1.  One
    universally closed conjunct per challenge width, each a disjunction of
    the quantifier-free types ``m`` realizes at that width.
    """
    if depth_bound < 1:
        raise ValueError("depth bound must be at least 1")
    if max(m.size, 1) ** depth_bound > 200_000:
        raise FormulaBudgetError("type enumeration too large for synthesis")
    conjuncts: list[Formula] = []
    for width in range(1, depth_bound + 1):
        ys = tuple(_var(i) for i in range(width))
        branches: list[Formula] = []
        vacuous = False
        for pinned in itertools.product(range(m.size), repeat=width):
            inner = _theta(m, pinned)
            if inner is None:
                vacuous = True
                break
            branches.append(inner)
        if vacuous:
            continue
        if branches:
            conjuncts.append(Forall(ys, make_or(branches)))
        else:
            conjuncts.append(Forall(ys, false_leaf(ys[0])))
    if not conjuncts:
        return Forall((_var(0),), true_leaf(_var(0)))
    return make_and(conjuncts)


def synth_leq1_sentence(m: Structure) -> Formula:
    """Existential sentence meaning "relates forward to ``m`` at clock 1".

    Holds in ``N`` exactly when every atomic type realized in ``m`` is
    realized in ``N``.  Duplicate entries in a challenge never demand more
    than their duplicate-free support does, so widths stop at ``m.size``.
    """
    conjuncts: list[Formula] = []
    for width in range(1, m.size + 1):
        ys = tuple(_var(i) for i in range(width))
        for pinned in itertools.permutations(range(m.size), width):
            inner = _theta(m, pinned)
            conjuncts.append(Exists(ys, inner if inner is not None else true_leaf(ys[0])))
    if not conjuncts:
        # Degenerate empty reference: the relation holds vacuously, and the
        # constant-true sentence needs a quantifier to exist at all.
        return Forall((_var(0),), true_leaf(_var(0)))
    return make_and(conjuncts)


def isolate_pi_type(m: Structure, a: tuple[int, ...], beta: int) -> Formula:
    """Universal formula isolating which tuples of ``m`` dominate ``(m, a)``.

    Evaluated inside ``m`` itself on a same-length tuple ``c``, the result
    holds exactly when ``(m, c)`` relates backward to ``(m, a)`` at clock
    ``beta``.  At clock 0 this is just the atomic type of ``a``; above that
    it conjoins one distinguishing formula per non-dominating tuple, each
    true at ``a`` and false at its target, and transfer along the backward
    relation keeps the conjunction true at every dominating tuple.

    The classified pi rank is at most ``beta`` when ``a`` is nonempty and
    at most ``max(1, beta)`` when it is empty: a formula with no free
    variables cannot be quantifier-free, so the empty tuple's clock-0
    type is a universally closed tautology rather than a bare literal.
    """
    if any(not (0 <= x < m.size) for x in a):
        raise ValueError("pinned tuple out of range")
    if beta < 0:
        raise ValueError("clock must be non-negative")
    if beta > 3:
        raise FormulaBudgetError("clock beyond the supported synthesis depth")
    if beta == 0:
        return atomic_type_formula(m, a)
    conjuncts: list[Formula] = []
    for c in itertools.product(range(m.size), repeat=len(a)):
        query = Position(m, a, m, c, beta)
        if bf_leq(query).holds:
            continue
        conjuncts.append(distinguishing_formula(query))
    if not conjuncts:
        if a:
            return true_leaf(_var(0))
        return Forall((_var(0),), true_leaf(_var(0)))
    return make_and(conjuncts)


def internal_sigma(m: Structure, f: Formula, alpha: int) -> Formula:
    """Existential-shape equivalent of ``f`` inside the one structure ``m``.

    Requires the classified e rank of ``f`` to be at most ``alpha``; the
    output has sigma rank at most ``alpha`` and the same truth value as
    ``f`` under every assignment into ``m``.  Nothing is claimed about
    other structures.

    The construction enumerates the satisfying assignments, extends each by
    a full enumeration of the universe, and existentially quantifies the
    clock ``alpha - 1`` isolating formula of the extended tuple.  Any tuple
    picked up by one of these disjuncts dominates a satisfying extension
    closely enough for the truth of ``f`` to transfer back to it.
    """
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if alpha > 2:
        raise FormulaBudgetError("alpha beyond the supported synthesis depth")
    report = classify(f)
    if report.e_rank > alpha:
        raise RankBoundError(
            f"classified e rank {report.e_rank} exceeds alpha {alpha}"
        )
    if report.sigma_rank <= alpha:
        return f

    xs = tuple(sorted(free_variables(f)))
    satisfying = [
        values
        for values in itertools.product(range(m.size), repeat=len(xs))
        if eval_formula(f, m, dict(zip(xs, values)))
    ]
    if not satisfying:
        if xs:
            return false_leaf(xs[0])
        return Exists((_var(0),), false_leaf(_var(0)))

    enum = tuple(range(m.size))
    taken = set(xs)
    bound_names = []
    j = 0
    while len(bound_names) < m.size:
        candidate = f"w{j}"
        if candidate not in taken:
            bound_names.append(candidate)
        j += 1

    disjuncts: list[Formula] = []
    for values in satisfying:
        iso = isolate_pi_type(m, values + enum, alpha - 1)
        renaming = {_var(i): xs[i] for i in range(len(xs))}
        renaming.update(
            {_var(len(xs) + i): bound_names[i] for i in range(m.size)}
        )
        body = substitute(iso, renaming)
        disjuncts.append(Exists(tuple(bound_names), body) if bound_names else body)
    return make_or(disjuncts)
