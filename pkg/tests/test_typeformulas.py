"""Synthesized formulas tracking the relation: canonical type formulas,
one-round sentence synthesis, type isolation, and existential conversion."""

from __future__ import annotations

import itertools
import random

import pytest

from backforth import (
    FormulaBudgetError,
    Position,
    RankBoundError,
    Signature,
    Structure,
    atomic_type_formula,
    bf_geq,
    bf_leq,
    build_linear_order,
    canonical_type_formulas,
    classify,
    eval_formula,
    internal_sigma,
    isolate_pi_type,
    parse_formula,
    serialize_formula,
    synth_geq1_sentence,
    synth_leq1_sentence,
)
from oracles import random_structure

C2 = build_linear_order(2)
C3 = build_linear_order(3)
C4 = build_linear_order(4)
EDGE = Structure.of(Signature((("R", 2),)), 2, {"R": [(0, 1)]})


def _env(values):
    return {f"v{i}": v for i, v in enumerate(values)}


# --------------------------------------------------------------------------
# canonical type formulas


def test_canonical_empty_signature_single_element():
    # Over an atom-free signature the one-point structure sits below only
    # other one-point structures (larger ones realize unequal pairs), while
    # everything with at least one element sits below it.
    m1 = Structure.of(Signature(()), 1, {})
    phi, psi = canonical_type_formulas(m1, (), 1)
    assert serialize_formula(phi) == "(exists (v0) (rel = v0 v0))"
    for size in (1, 2, 3):
        other = Structure.of(Signature(()), size, {})
        assert eval_formula(psi, other, {}) == (size == 1)
        assert eval_formula(psi, other, {}) == bf_leq(Position(m1, (), other, (), 1)).holds
        assert eval_formula(phi, other, {})
        assert bf_leq(Position(other, (), m1, (), 1)).holds


def test_canonical_directions_on_the_chain_pair():
    phi, psi = canonical_type_formulas(C3, (), 1)
    assert eval_formula(psi, C2, {}) == bf_leq(Position(C3, (), C2, (), 1)).holds
    assert eval_formula(phi, C2, {}) == bf_geq(Position(C3, (), C2, (), 1)).holds
    assert eval_formula(psi, C2, {})
    assert not eval_formula(phi, C2, {})


def test_canonical_rank_bounds():
    for n in (0, 1, 2):
        phi, psi = canonical_type_formulas(C3, (0,), n)
        assert classify(phi).ebar_rank <= max(1, n)
        assert classify(psi).a_rank <= max(1, n)


def test_canonical_agrees_with_the_solver_on_samples():
    rng = random.Random(61)
    for _ in range(25):
        m = random_structure(rng, rng.randint(1, 3))
        n_struct = random_structure(rng, rng.randint(1, 4))
        pin = rng.randint(0, 1)
        a = tuple(rng.randrange(m.size) for _ in range(pin))
        b = tuple(rng.randrange(n_struct.size) for _ in range(pin))
        clock = rng.randint(0, 2)
        phi, psi = canonical_type_formulas(m, a, clock)
        forward = Position(m, a, n_struct, b, clock)
        assert eval_formula(psi, n_struct, _env(b)) == bf_leq(forward).holds
        assert eval_formula(phi, n_struct, _env(b)) == bf_geq(forward).holds


def test_canonical_validation():
    with pytest.raises(ValueError):
        canonical_type_formulas(C3, (9,), 1)
    with pytest.raises(ValueError):
        canonical_type_formulas(C3, (), -1)
    with pytest.raises(ValueError):
        canonical_type_formulas(C3, (), 1, tuple_bound=0)
    with pytest.raises(FormulaBudgetError):
        canonical_type_formulas(C3, (), 4)
    with pytest.raises(FormulaBudgetError):
        canonical_type_formulas(C4, (), 1, tuple_bound=9)


# --------------------------------------------------------------------------
# one-round sentence synthesis


def test_leq1_sentence_on_chains():
    sentence = synth_leq1_sentence(C3)
    assert classify(sentence).ebar_rank == 1
    assert not eval_formula(sentence, C2, {})
    assert eval_formula(sentence, C3, {})
    assert eval_formula(sentence, C4, {})


def test_leq1_sentence_matches_the_solver():
    rng = random.Random(67)
    for _ in range(25):
        m = random_structure(rng, rng.randint(1, 3))
        n_struct = random_structure(rng, rng.randint(1, 3))
        sentence = synth_leq1_sentence(m)
        want = bf_leq(Position(n_struct, (), m, (), 1)).holds
        assert eval_formula(sentence, n_struct, {}) == want


def test_geq1_sentence_on_chains():
    sentence = synth_geq1_sentence(C3, 4)
    assert classify(sentence).pi_rank == 1
    assert eval_formula(sentence, C2, {})
    assert eval_formula(sentence, C3, {})
    assert not eval_formula(sentence, C4, {})


def test_geq1_sentence_guarantee_is_scoped_to_the_depth_bound():
    # at depth bound 3 the chain of length 4 is out of scope and the
    # sentence misses the width-4 challenge that refutes the relation
    narrow = synth_geq1_sentence(C3, 3)
    assert eval_formula(narrow, C4, {})
    assert not bf_geq(Position(C4, (), C3, (), 1)).holds


def test_geq1_sentence_on_unary_structures():
    # A pair of distinct elements can never mirror a one-point structure's
    # tuples, so even the all-U two-point structure fails the sentence.
    m1 = Structure.of(Signature((("U", 1),)), 1, {"U": [(0,)]})
    mixed = Structure.of(Signature((("U", 1),)), 2, {"U": [(0,)]})
    all_u = Structure.of(Signature((("U", 1),)), 2, {"U": [(0,), (1,)]})
    sentence = synth_geq1_sentence(m1, 2)
    assert eval_formula(sentence, m1, {})
    assert not eval_formula(sentence, mixed, {})
    assert not eval_formula(sentence, all_u, {})
    assert not bf_geq(Position(all_u, (), m1, (), 1)).holds


def test_geq1_sentence_matches_the_solver_within_scope():
    rng = random.Random(71)
    for _ in range(25):
        m = random_structure(rng, rng.randint(1, 3))
        n_struct = random_structure(rng, rng.randint(1, 3))
        sentence = synth_geq1_sentence(m, 3)
        want = bf_geq(Position(n_struct, (), m, (), 1)).holds
        assert eval_formula(sentence, n_struct, {}) == want


def test_sentence_synthesis_validation():
    with pytest.raises(ValueError):
        synth_geq1_sentence(C3, 0)
    with pytest.raises(FormulaBudgetError):
        synth_geq1_sentence(C3, 12)


# --------------------------------------------------------------------------
# type isolation


def test_isolate_clock_zero_is_the_atomic_type():
    got = isolate_pi_type(C3, (1,), 0)
    assert serialize_formula(got) == serialize_formula(atomic_type_formula(C3, (1,)))


def test_isolate_holds_at_the_pinned_tuple():
    for beta in (0, 1, 2):
        formula = isolate_pi_type(C4, (2,), beta)
        assert eval_formula(formula, C4, _env((2,)))


def test_isolate_is_extensional_for_the_backward_relation():
    for beta in (1, 2):
        formula = isolate_pi_type(C3, (1,), beta)
        assert classify(formula).pi_rank <= beta
        for c in range(C3.size):
            want = bf_leq(Position(C3, (1,), C3, (c,), beta)).holds
            assert eval_formula(formula, C3, _env((c,))) == want


def test_isolate_on_sampled_structures():
    rng = random.Random(73)
    for _ in range(20):
        m = random_structure(rng, rng.randint(1, 3))
        a = (rng.randrange(m.size),)
        beta = rng.randint(1, 2)
        formula = isolate_pi_type(m, a, beta)
        assert classify(formula).pi_rank <= beta
        for c in range(m.size):
            want = bf_leq(Position(m, a, m, (c,), beta)).holds
            assert eval_formula(formula, m, _env((c,))) == want


def test_isolate_empty_tuple_with_nothing_to_separate():
    formula = isolate_pi_type(C3, (), 1)
    assert eval_formula(formula, C3, {})


def test_isolate_validation():
    with pytest.raises(ValueError):
        isolate_pi_type(C3, (7,), 1)
    with pytest.raises(ValueError):
        isolate_pi_type(C3, (0,), -1)
    with pytest.raises(FormulaBudgetError):
        isolate_pi_type(C3, (0,), 4)


# --------------------------------------------------------------------------
# existential conversion inside a host structure

SLANTED = parse_formula(
    "(and (or (forall (u) (not (rel R u x))) (forall (v) (rel R x v)))"
    " (not (rel R x x)))"
)


def test_internal_sigma_returns_existential_input_unchanged():
    f = parse_formula("(exists (x) (rel R x y))")
    assert internal_sigma(EDGE, f, 1) is f


def test_internal_sigma_converts_a_universal_shape():
    report = classify(SLANTED)
    assert report.e_rank == 2
    assert report.sigma_rank > 2
    out = internal_sigma(EDGE, SLANTED, 2)
    assert classify(out).sigma_rank <= 2
    for x in range(EDGE.size):
        assert eval_formula(out, EDGE, {"x": x}) == eval_formula(
            SLANTED, EDGE, {"x": x}
        )


def test_internal_sigma_unsatisfiable_body_becomes_a_false_leaf():
    f = parse_formula(
        "(and (or (forall (u) (rel R u x)) (forall (v) (rel R x v)))"
        " (rel R x x))"
    )
    out = internal_sigma(EDGE, f, 2)
    assert classify(out).sigma_rank == 0
    for x in range(EDGE.size):
        assert not eval_formula(out, EDGE, {"x": x})


def test_internal_sigma_on_sampled_hosts():
    rng = random.Random(79)
    for _ in range(12):
        host = random_structure(rng, rng.randint(2, 3))
        out = internal_sigma(host, SLANTED, 2)
        assert classify(out).sigma_rank <= 2
        for x in range(host.size):
            assert eval_formula(out, host, {"x": x}) == eval_formula(
                SLANTED, host, {"x": x}
            )


def test_internal_sigma_rank_gate():
    f = parse_formula("(forall (x) (rel R x y))")
    assert classify(f).e_rank == 2
    with pytest.raises(RankBoundError):
        internal_sigma(EDGE, f, 1)


def test_internal_sigma_validation():
    with pytest.raises(ValueError):
        internal_sigma(EDGE, SLANTED, 0)
    with pytest.raises(FormulaBudgetError):
        internal_sigma(EDGE, SLANTED, 3)
