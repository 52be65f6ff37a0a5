"""Set-family domination, flower-graph claim verifiers, disjoint-union
criteria, and interval factoring on linear orders."""

from __future__ import annotations

import itertools
import random

import pytest

from backforth import (
    ComponentSpec,
    Family,
    Position,
    Signature,
    SizeBudgetError,
    Structure,
    bf_geq,
    build_linear_order,
    check_union_criteria,
    check_union_refutation,
    close_family,
    dominates,
    interval_factoring_check,
    parse_family_literal,
    verify_claim_geq3,
    verify_claim_subsetleq2,
)

SIG = Signature((("R", 2),))
X_EDGE = Structure.of(SIG, 2, {"R": [(0, 1)]})
Y_POINT = Structure.of(SIG, 1, {})
Y_LOOP = Structure.of(SIG, 1, {"R": [(0, 0)]})


# --------------------------------------------------------------------------
# families


def test_dominates_examples():
    s = Family.of([{0}], 2)
    t = Family.of([{0}, {0, 1}], 2)
    assert dominates(s, t)
    assert not dominates(Family.of([{1}], 2), s)
    assert dominates(s, s)
    assert dominates(Family.of([set()], 1), Family.of([{0}], 1))


def test_parse_family_literal():
    fam = parse_family_literal("{1,2}; {3} ;{}")
    assert fam.sets == frozenset(
        {frozenset({1, 2}), frozenset({3}), frozenset()}
    )
    assert fam.universe_bound == 4
    assert parse_family_literal("{}").universe_bound == 1
    assert parse_family_literal("{0}", 5).universe_bound == 5


def test_parse_family_literal_rejections():
    with pytest.raises(ValueError):
        parse_family_literal("1,2")
    with pytest.raises(ValueError):
        parse_family_literal("{a}")
    with pytest.raises(ValueError):
        parse_family_literal("{-1}")
    with pytest.raises(ValueError):
        parse_family_literal("{3}", 2)


# --------------------------------------------------------------------------
# flower-graph claims


def test_subset_claim_on_identical_families():
    fam = parse_family_literal("{0}", 2)
    report = verify_claim_subsetleq2(fam, fam, [1, 2])
    assert report.dominates_holds
    assert [(r.copies, r.verdict, r.agrees) for r in report.rows] == [
        (1, "true", True),
        (2, "true", True),
    ]
    assert report.stabilized
    assert report.stable_verdict == "true"
    assert report.agreement is True


def test_subset_claim_reports_disagreement_honestly():
    # upward closures of the empty set and of a singleton: the criterion
    # holds, yet every finite truncation resolves the other way, because a
    # fixed copy count leaves the right side with spare tagged territory
    s = close_family(Family.of([set()], 2))
    t = close_family(Family.of([{0}], 2))
    assert dominates(s, t)
    report = verify_claim_subsetleq2(s, t, [1, 2])
    assert [(r.copies, r.verdict) for r in report.rows] == [
        (1, "false"),
        (2, "false"),
    ]
    assert report.stabilized
    assert report.stable_verdict == "false"
    assert report.agreement is False


def test_subset_claim_unresolved_rows():
    report = verify_claim_subsetleq2(
        Family.of([{0}], 2), Family.of([{1}], 2), [2, 1], node_budget=5
    )
    assert [r.verdict for r in report.rows] == ["unresolved", "unresolved"]
    assert all(r.agrees is None for r in report.rows)
    assert not report.stabilized
    assert report.stable_verdict is None
    assert report.agreement is None


def test_subset_claim_rejects_empty_schedule():
    fam = parse_family_literal("{0}")
    with pytest.raises(ValueError):
        verify_claim_subsetleq2(fam, fam, [])


def test_flower_budget_guards():
    long_loop = Family.of([{6}], 7)
    with pytest.raises(SizeBudgetError):
        verify_claim_subsetleq2(long_loop, long_loop, [1])
    wide = Family.of([{0, 1, 2}], 3)
    with pytest.raises(SizeBudgetError):
        verify_claim_subsetleq2(wide, wide, [20])


def test_copy_claim_hypothesis_failures():
    not_subset = verify_claim_geq3(Family.of([{0}], 2), Family.of([{1}], 2), 1)
    assert not not_subset.hypothesis_ok
    assert len(not_subset.failures) >= 1
    assert not_subset.verdict is None

    s = Family.of([{0, 1}], 3)
    t = Family.of([{0, 1}, {2}], 3)
    not_dominating = verify_claim_geq3(s, t, 1)
    assert not not_dominating.hypothesis_ok
    assert any("contains no member" in f for f in not_dominating.failures)
    assert not_dominating.verdict is None


def test_copy_claim_identical_families():
    fam = Family.of([{0}], 1)
    report = verify_claim_geq3(fam, fam, 1)
    assert report.hypothesis_ok
    assert report.failures == ()
    assert report.verdict == "true"


def test_copy_claim_reports_the_small_truncation_verdict():
    # hypotheses hold, but two copies leave the richer side distinguishable
    s = Family.of([set()], 1)
    t = Family.of([set(), {0}], 1)
    report = verify_claim_geq3(s, t, 2)
    assert report.hypothesis_ok
    assert report.verdict == "false"


# --------------------------------------------------------------------------
# disjoint-union criteria


def test_union_criteria_identical_specs():
    spec = ComponentSpec(((X_EDGE, 2),))
    report = check_union_criteria(spec, (0, 1), spec, (0, 1), 2)
    assert report.all_conditions_hold
    assert report.multiplicity == 2
    assert report.conclusion_checked
    assert report.conclusion_holds is True


def test_union_criteria_class_pattern_mismatch():
    a_spec = ComponentSpec(((X_EDGE, 1),))
    b_spec = ComponentSpec(((X_EDGE, 2),))
    report = check_union_criteria(a_spec, (0, 1), b_spec, (0, 2), 2)
    assert not report.cond_a
    assert report.counter_a == (0, 1)
    assert not report.conclusion_checked
    assert report.conclusion_holds is None


def test_union_criteria_pinned_block_failure():
    spec = ComponentSpec(((X_EDGE, 1),))
    report = check_union_criteria(spec, (0,), spec, (1,), 2)
    assert report.cond_a
    assert not report.cond_b
    assert report.counter_b == 0


def test_union_criteria_component_cover_failures():
    a_spec = ComponentSpec(((Y_POINT, 1),))
    b_spec = ComponentSpec(((X_EDGE, 1),))
    report = check_union_criteria(a_spec, (), b_spec, (), 2)
    assert not report.cond_c
    assert report.counter_c == 0

    report_d = check_union_criteria(
        ComponentSpec(((Y_POINT, 1),)), (), ComponentSpec(((Y_LOOP, 1),)), (), 2
    )
    assert not report_d.cond_d
    assert report_d.counter_d == 0


def test_union_criteria_conditions_do_not_suffice_at_this_multiplicity():
    # all four conditions hold, yet the six tagged classes on one side
    # outnumber the three on the other, so the full-union query fails;
    # the report keeps both facts visible instead of reconciling them
    a_spec = ComponentSpec(((X_EDGE, 3),))
    b_spec = ComponentSpec(((X_EDGE, 3), (Y_POINT, 3)))
    report = check_union_criteria(a_spec, (), b_spec, (), 2)
    assert report.all_conditions_hold
    assert report.multiplicity == 3
    assert report.conclusion_checked
    assert report.conclusion_holds is False


def test_union_criteria_validation():
    spec = ComponentSpec(((X_EDGE, 1),))
    other_sig = ComponentSpec(
        ((Structure.of(Signature((("S", 2),)), 2, {"S": [(0, 1)]}), 1),)
    )
    with pytest.raises(ValueError):
        check_union_criteria(spec, (), other_sig, (), 2)
    with pytest.raises(ValueError):
        check_union_criteria(spec, (0,), spec, (), 2)
    with pytest.raises(ValueError):
        check_union_criteria(spec, (), spec, (), 0)


def test_union_refutation_none_on_identical_specs():
    spec = ComponentSpec(((X_EDGE, 2),))
    report = check_union_refutation(spec, spec, 2)
    assert report.witness_index is None
    assert report.refutation_verified is None


def test_union_refutation_finds_and_verifies_a_witness():
    a_spec = ComponentSpec(((X_EDGE, 1),))
    b_spec = ComponentSpec(((X_EDGE, 1), (Y_LOOP, 1)))
    report = check_union_refutation(a_spec, b_spec, 2)
    assert report.witness_index == 1
    assert report.refutation_verified is True
    # the witness genuinely lacks a dominating partner one clock down
    assert not bf_geq(Position(X_EDGE, (), Y_LOOP, (), 1)).holds


def test_union_refutation_validation():
    spec = ComponentSpec(((X_EDGE, 1),))
    with pytest.raises(ValueError):
        check_union_refutation(spec, spec, 0)


# --------------------------------------------------------------------------
# interval factoring


def _chain(size):
    return build_linear_order(size)


def test_interval_factoring_identity_pinning():
    c5 = _chain(5)
    report = interval_factoring_check(c5, (1, 3), c5, (1, 3), 2)
    assert report.direct
    assert report.factored
    assert report.per_interval == (True, True, True)
    assert report.agreement
    sizes = [
        (left.size, right.size) for left, right in report.decomposition.segments
    ]
    assert sizes == [(1, 1), (1, 1), (1, 1)]


def test_interval_factoring_empty_tuples_reduce_to_the_direct_query():
    report = interval_factoring_check(_chain(4), (), _chain(3), (), 1)
    assert report.per_interval == (report.direct,)
    assert report.agreement


def test_interval_factoring_uneven_segments():
    report = interval_factoring_check(_chain(5), (1, 3), _chain(4), (0, 3), 2)
    sizes = [
        (left.size, right.size) for left, right in report.decomposition.segments
    ]
    assert sizes == [(1, 0), (1, 2), (1, 0)]
    assert report.agreement


def test_interval_factoring_exhaustive_small_agreement():
    rng = random.Random(83)
    for _ in range(40):
        size_a = rng.randint(1, 4)
        size_b = rng.randint(1, 4)
        k = rng.randint(0, min(size_a, size_b, 1))
        a_tuple = tuple(sorted(rng.sample(range(size_a), k)))
        b_tuple = tuple(sorted(rng.sample(range(size_b), k)))
        n = rng.randint(0, 2)
        report = interval_factoring_check(
            _chain(size_a), a_tuple, _chain(size_b), b_tuple, n
        )
        assert report.agreement


def test_interval_factoring_validation():
    c3 = _chain(3)
    loopy = Structure.of(SIG, 2, {"R": [(0, 0), (0, 1)]})
    with pytest.raises(ValueError):
        interval_factoring_check(loopy, (), loopy, (), 1)
    with pytest.raises(ValueError):
        interval_factoring_check(c3, (2, 1), c3, (0, 1), 1)
    with pytest.raises(ValueError):
        interval_factoring_check(c3, (0,), c3, (), 1)
    with pytest.raises(ValueError):
        interval_factoring_check(c3, (5,), c3, (0,), 1)
    with pytest.raises(ValueError):
        interval_factoring_check(c3, (), c3, (), -1)
    two_rel = Structure.of(
        Signature((("R", 2), ("S", 2))), 2, {"R": [(0, 1)]}
    )
    with pytest.raises(ValueError):
        interval_factoring_check(two_rel, (), two_rel, (), 1)
    renamed = Structure.of(Signature((("S", 2),)), 2, {"S": [(0, 1)]})
    with pytest.raises(ValueError):
        interval_factoring_check(_chain(2), (), renamed, (), 1)
