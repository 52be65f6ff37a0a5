"""The memoized relation solver against the brute-force oracle, plus the
strategy extractors and constructive separation."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backforth import (
    GameContractError,
    NodeBudgetError,
    Position,
    Signature,
    Structure,
    best_reply,
    bf_equiv,
    bf_geq,
    bf_leq,
    bf_rank,
    build_linear_order,
    classify,
    distinguishing_formula,
    duplicator_reply,
    eval_formula,
    parse_structure,
    spoiler_witness,
)
from oracles import naive_leq, random_structure

C2 = build_linear_order(2)
C3 = build_linear_order(3)
EDGE = Structure.of(Signature((("R", 2),)), 2, {"R": [(0, 1)]})
BLANK2 = Structure.of(Signature((("R", 2),)), 2, {})


def _random_position(rng, max_size=4, max_clock=3):
    left = random_structure(rng, rng.randint(1, max_size))
    right = random_structure(rng, rng.randint(1, max_size))
    pin = rng.randint(0, 2)
    return Position(
        left,
        tuple(rng.randrange(left.size) for _ in range(pin)),
        right,
        tuple(rng.randrange(right.size) for _ in range(pin)),
        rng.randint(0, max_clock),
    )


def test_chain_direction():
    assert bf_leq(Position(C3, (), C2, (), 1)).holds
    assert not bf_leq(Position(C2, (), C3, (), 1)).holds


def test_reflexivity_small_clocks():
    for n in range(4):
        assert bf_leq(Position(C3, (0, 2), C3, (0, 2), n)).holds


def test_clock_zero_empty_tuples_always_holds():
    assert bf_leq(Position(C2, (), C3, (), 0)).holds
    assert bf_leq(Position(EDGE, (), BLANK2, (), 0)).holds


def test_clock_zero_compares_atomic_types():
    # (1, 1) sees no edge on either side; (0, 1) spans one only on the left
    assert bf_leq(Position(EDGE, (1, 1), BLANK2, (1, 1), 0)).holds
    assert not bf_leq(Position(EDGE, (0, 1), BLANK2, (0, 1), 0)).holds


def test_position_rejects_ragged_tuples():
    with pytest.raises(ValueError):
        Position(C2, (0,), C3, (), 1)


def test_verdict_witness_refutes():
    verdict = bf_leq(Position(C2, (), C3, (), 2))
    assert not verdict.holds
    challenge = verdict.witness
    assert challenge is not None
    replies = itertools.product(range(C2.size), repeat=len(challenge))
    assert all(
        not bf_leq(Position(C3, challenge, C2, reply, 1)).holds for reply in replies
    )


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_solver_matches_naive_oracle(seed):
    rng = random.Random(seed)
    pos = _random_position(rng, max_size=3, max_clock=2)
    assert (
        bf_leq(pos).holds
        == naive_leq(pos.left, pos.left_tuple, pos.right, pos.right_tuple, pos.clock)
    )


def test_geq_is_the_flip_and_equiv_the_conjunction():
    pos = Position(C3, (), C2, (), 1)
    assert bf_geq(pos).holds == bf_leq(pos.flipped()).holds
    assert not bf_equiv(pos).holds
    assert bf_equiv(Position(C3, (), C3, (), 3)).holds


def test_equiv_witness_comes_from_the_failing_direction():
    verdict = bf_equiv(Position(C3, (), C2, (), 1))
    assert not verdict.holds
    assert verdict.witness is not None


def test_rank_examples():
    assert bf_rank(C3, C3, 3) == 3
    assert bf_rank(C2, C3, 3) == 0
    u_blank = parse_structure("signature U/1\nuniverse 1\n")
    u_marked = parse_structure("signature U/1\nuniverse 1\nrel U: (0)")
    assert bf_rank(u_blank, u_marked, 3) == 0


def test_rank_is_monotone_under_the_cap():
    rng = random.Random(5)
    for _ in range(25):
        left = random_structure(rng, rng.randint(1, 3))
        right = random_structure(rng, rng.randint(1, 3))
        r = bf_rank(left, right, 3)
        for n in range(r + 1):
            assert bf_equiv(Position(left, (), right, (), n)).holds


# --------------------------------------------------------------------------
# strategies


def test_duplicator_reply_empty_challenge():
    assert duplicator_reply(Position(C3, (), C2, (), 1), ()) == ()


def test_duplicator_reply_identity_structures():
    pos = Position(C3, (), C3, (), 2)
    reply = duplicator_reply(pos, (2, 0))
    assert bf_leq(Position(C3, (2, 0), C3, reply, 1)).holds


def test_duplicator_reply_rejects_failing_positions():
    with pytest.raises(GameContractError):
        duplicator_reply(Position(C2, (), C3, (), 1), (0, 1, 2))


def test_duplicator_replies_verify_on_random_holding_positions():
    rng = random.Random(11)
    seen = 0
    while seen < 60:
        pos = _random_position(rng, max_size=4, max_clock=3)
        if pos.clock < 1 or not bf_leq(pos).holds:
            continue
        seen += 1
        length = rng.randint(0, pos.right.size)
        challenge = tuple(rng.randrange(pos.right.size) for _ in range(length))
        reply = duplicator_reply(pos, challenge)
        follow = Position(
            pos.right,
            pos.right_tuple + challenge,
            pos.left,
            pos.left_tuple + reply,
            pos.clock - 1,
        )
        assert bf_leq(follow).holds


def test_best_reply_answers_on_failing_positions_too():
    # the position fails, yet the empty challenge still has a sound answer
    pos = Position(C2, (), C3, (), 2)
    assert not bf_leq(pos).holds
    assert best_reply(pos, (0, 1)) is not None
    assert best_reply(pos, (0, 1, 2)) is None


def test_spoiler_witness_chain_pair():
    assert spoiler_witness(Position(C2, (), C3, (), 1)) == (0, 1, 2)


def test_spoiler_witness_atomic_difference():
    assert spoiler_witness(Position(BLANK2, (), EDGE, (), 1)) == (0, 1)


def test_spoiler_witness_rejects_holding_positions():
    with pytest.raises(GameContractError):
        spoiler_witness(Position(C3, (), C2, (), 1))


def test_spoiler_witness_is_unanswerable():
    rng = random.Random(23)
    seen = 0
    while seen < 40:
        pos = _random_position(rng, max_size=4, max_clock=3)
        if pos.clock < 1 or bf_leq(pos).holds:
            continue
        seen += 1
        challenge = spoiler_witness(pos)
        for reply in itertools.product(
            range(pos.left.size), repeat=len(challenge)
        ):
            follow = Position(
                pos.right,
                pos.right_tuple + challenge,
                pos.left,
                pos.left_tuple + reply,
                pos.clock - 1,
            )
            assert not bf_leq(follow).holds


# --------------------------------------------------------------------------
# constructive separation


def test_distinguishing_formula_clock_zero_atomic_difference():
    pos = Position(EDGE, (0, 1), BLANK2, (1, 0), 0)
    formula = distinguishing_formula(pos)
    assert eval_formula(formula, EDGE, {"v0": 0, "v1": 1})
    assert not eval_formula(formula, BLANK2, {"v0": 1, "v1": 0})


def test_distinguishing_formula_chain_sentence():
    pos = Position(C2, (), C3, (), 1)
    formula = distinguishing_formula(pos)
    assert classify(formula).pi_rank <= 1
    assert eval_formula(formula, C2, {})
    assert not eval_formula(formula, C3, {})


def test_distinguishing_formula_random_failing_positions():
    rng = random.Random(31)
    seen = 0
    while seen < 60:
        pos = _random_position(rng, max_size=4, max_clock=3)
        if bf_leq(pos).holds:
            continue
        seen += 1
        formula = distinguishing_formula(pos)
        assert classify(formula).pi_rank <= pos.clock
        left_env = {f"v{k}": v for k, v in enumerate(pos.left_tuple)}
        right_env = {f"v{k}": v for k, v in enumerate(pos.right_tuple)}
        assert eval_formula(formula, pos.left, left_env)
        assert not eval_formula(formula, pos.right, right_env)


def test_distinguishing_formula_rejects_holding_positions():
    with pytest.raises(GameContractError):
        distinguishing_formula(Position(C3, (), C3, (), 2))


# --------------------------------------------------------------------------
# resource control


def test_node_budget_exhaustion_raises():
    left = build_linear_order(6)
    right = build_linear_order(6)
    with pytest.raises(NodeBudgetError):
        bf_leq(Position(left, (), right, (), 3), node_budget=10)


def test_nestedness_on_sampled_positions():
    rng = random.Random(43)
    for _ in range(60):
        pos = _random_position(rng, max_size=3, max_clock=0)
        for n in (3, 2, 1):
            stepped = Position(
                pos.left, pos.left_tuple, pos.right, pos.right_tuple, n
            )
            weaker = Position(
                pos.left, pos.left_tuple, pos.right, pos.right_tuple, n - 1
            )
            if bf_leq(stepped).holds:
                assert bf_leq(weaker).holds


def test_transitivity_on_sampled_triples():
    rng = random.Random(47)
    hits = 0
    for _ in range(400):
        a = random_structure(rng, rng.randint(1, 3))
        b = random_structure(rng, rng.randint(1, 3))
        c = random_structure(rng, rng.randint(1, 3))
        n = rng.randint(1, 2)
        if (
            bf_leq(Position(a, (), b, (), n)).holds
            and bf_leq(Position(b, (), c, (), n)).holds
        ):
            hits += 1
            assert bf_leq(Position(a, (), c, (), n)).holds
    assert hits > 10
