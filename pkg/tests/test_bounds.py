import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilatekit.core.intset import IntSet
from dilatekit.errors import ClassIndexError, OutOfScopeError, PreconditionError, UnknownBoundError
from dilatekit.services.bounds import (
    BOUND_NAMES,
    build_context,
    chain_gap,
    class_profile,
    classify,
    confirm_with_oracle,
    corollary1_check,
    corollary2_check,
    evaluate_bound,
    full_classes_check,
    lemma_2full_check,
    lemma_da_check,
    lemma_graph_check,
    lemma_imp2_check,
    lemma_contexts,
    lemma_imp_check,
    prop_l_check,
    theorem_bound,
    theorem_check,
    two_k_size,
)
from dilatekit.services.reports import BoundReport


def ap(n):
    return IntSet(range(n))


@pytest.mark.parametrize("k,kind,primes,in_scope", [
    (3, "prime_power", (3,), True),
    (9, "prime_power", (3,), True),
    (15, "semiprime", (3, 5), True),
    (45, "other", (3, 5), False),
    (4, "prime_power", (2,), False),
    (6, "semiprime", (2, 3), False),
])
def test_classify(k, kind, primes, in_scope):
    fac = classify(k)
    assert (fac.kind, fac.primes, fac.in_scope) == (kind, primes, in_scope)


def test_prop_l_equality_and_singletons(small_ap):
    report = prop_l_check(2, 3, small_ap, small_ap)
    assert (report.actual, report.bound, report.margin) == (14, 14, 0)
    report = prop_l_check(2, 3, IntSet([0]), IntSet([0]))
    assert (report.actual, report.bound) == (1, 1)


def test_prop_l_needs_coprime_moduli(small_ap):
    with pytest.raises(PreconditionError) as exc:
        prop_l_check(3, 6, small_ap, small_ap)
    assert exc.value.name == "coprime"


@pytest.mark.parametrize("values,actual,bound", [
    ([0, 1, 3], 8, 8),
    ([0], 1, 0),
    ([0, 1, 2, 3], 14, 12),
])
def test_corollary1(values, actual, bound):
    report = corollary1_check(2, 3, IntSet(values))
    assert (report.actual, report.bound, report.satisfied) == (actual, bound, True)


def test_corollary2_examples():
    assert (corollary2_check(3, ap(3)).actual, corollary2_check(3, ap(3)).bound) == (9, 9)
    assert (corollary2_check(5, ap(5)).actual, corollary2_check(5, ap(5)).bound) == (25, 25)
    report = corollary2_check(3, IntSet([0, 3]))
    assert not report.hypotheses_met
    with pytest.raises(PreconditionError):
        corollary2_check(4, ap(4))


@pytest.mark.parametrize("k", [3, 5, 9, 15])
def test_corollary2_equality_on_full_residue_system(k):
    report = corollary2_check(k, ap(k))
    assert report.hypotheses_met
    assert report.actual == report.bound == k * k


@pytest.mark.parametrize("k,size,expected", [(9, 100, 1012), (3, 217, 1075), (15, 2, -204)])
def test_theorem_bound(k, size, expected):
    assert theorem_bound(k, size) == expected


@given(k=st.integers(2, 40), s=st.integers(1, 10**6))
def test_theorem_bound_grows_by_k_plus_two(k, s):
    assert theorem_bound(k, s + 1) - theorem_bound(k, s) == k + 2


@given(k=st.integers(3, 41).filter(lambda k: k % 2), n=st.integers(1, 60))
def test_corollary2_bound_dominates_theorem_bound(k, n):
    assert chain_gap(k) >= 0
    assert (k + 2) * n - 2 * k - theorem_bound(k, n) == chain_gap(k)


def test_theorem_check_with_full_hypotheses():
    report = theorem_check(ap(220), 3)
    assert (report.actual, report.bound) == (1094, 1090)
    assert report.hypotheses_met and report.satisfied
    assert {h.name for h in report.hypotheses} == {
        "size_threshold_met", "largest_class_threshold_met", "k_in_scope"}


def test_theorem_check_small_and_out_of_threshold():
    report = theorem_check(ap(4), 9)
    assert report.bound == -44
    assert report.trivial and report.satisfied
    assert not report.hypotheses_met
    report = theorem_check(ap(25), 15)
    assert report.bound == 187
    assert report.actual == 17 * 25 - 30


def test_theorem_check_rejects_even_k(small_ap):
    with pytest.raises(PreconditionError, match="k_odd"):
        theorem_check(small_ap, 4)


def test_lemma_da():
    report = lemma_da_check(IntSet([0, 1, 3]), 3)
    assert (report.actual, report.bound) == (8, -21)
    report = lemma_da_check(ap(100), 3)
    assert (report.actual, report.bound) == (494, 464)
    assert lemma_da_check(IntSet([0]), 9).bound == 11 - 4 * 9**8 == 11 - 172186884
    with pytest.raises(OutOfScopeError):
        lemma_da_check(ap(3), 45)


def test_lemma_graph(small_ap):
    report = lemma_graph_check(small_ap, 3)
    assert (report.actual, report.bound) == (8, 6)


def test_full_classes_bound():
    report = full_classes_check(ap(9), 3)
    assert report.hypotheses_met
    assert (report.actual, report.bound) == (39, 33)


@settings(deadline=None, max_examples=60)
@given(values=st.lists(st.integers(-40, 40), min_size=1, max_size=20), k=st.sampled_from([3, 5, 7, 9]))
def test_class_profile_adds_up(values, k):
    A = IntSet(values)
    rows = class_profile(build_context(A, k))
    assert sum(r["own"] + r["delta"] for r in rows) == two_k_size(A, k)


def test_context_indices(two_class_set):
    ctx = build_context(two_class_set, 3)
    assert ctx.p == 3 and ctx.m_index == 2
    assert ctx.deltas[0] == 1
    with pytest.raises(ClassIndexError):
        ctx.delta(3)


def test_lemma_2full_active_instance(two_class_set):
    ctx = build_context(two_class_set, 3)
    report = lemma_2full_check(ctx, two_class_set, 1)
    part = report.parts[0]
    assert part.active and part.holds
    assert report.hypotheses_met and not report.violated


def test_lemma_2full_vacuous_instance(small_ap):
    report = lemma_2full_check(build_context(small_ap, 3), small_ap, 1)
    assert report.vacuous


def test_lemma_2full_needs_prime_power(small_ap):
    with pytest.raises(OutOfScopeError):
        lemma_2full_check(build_context(small_ap, 15), small_ap, 1)


def test_lemma_imp_zero_class_part(small_ap):
    report = lemma_imp_check(build_context(small_ap, 3), small_ap, 3)
    parts = {p.name: p for p in report.parts}
    assert not parts["part_i"].active
    assert parts["part_ii"].active and parts["part_ii"].value == 3 and parts["part_ii"].threshold == 2
    assert not report.violated


def test_lemma_imp_rejects_full_class_and_m(two_class_set, small_ap):
    # X_1 = {0, 1, 2, 3} covers Z/3Z, so class 1 is in F
    ctx = build_context(two_class_set, 3)
    assert 1 in ctx.decomposition.f_indices
    with pytest.raises(PreconditionError, match="i_in_E_minus_m"):
        lemma_imp_check(ctx, two_class_set, 1)
    with pytest.raises(PreconditionError):
        lemma_imp_check(build_context(small_ap, 3), small_ap, 2)


def test_lemma_imp_without_m():
    A = IntSet([0, 3, 6])
    report = lemma_imp_check(build_context(A, 3), A, 1)
    assert not report.applicable and report.vacuous


def test_lemma_imp2_coprime_case():
    A = IntSet([0, 1, 2, 30, 45])
    reports = [lemma_imp2_check(ctx, A, 2) for ctx in lemma_contexts("imp2", A, 15)]
    assert len(reports) == 2
    for r in reports:
        assert r.applicable and r.hypotheses_met
        assert r.parts[0].name == "coprime_i_eq_2"
        assert r.parts[0].threshold == 3 and r.parts[0].value == 4
        assert not r.violated


def test_lemma_imp2_p_case_depends_on_prime_order():
    # classes: {0, 15}, {3, 18}, {1}; gcd(u_2, 15) = 3
    A = IntSet([0, 1, 3, 15, 18])
    by_three, by_five = [lemma_imp2_check(ctx, A, 1) for ctx in lemma_contexts("imp2", A, 15)]
    assert by_three.applicable
    assert by_three.parts[0].name == "p_i_eq_1"
    assert (by_three.parts[0].value, by_three.parts[0].threshold) == (5, 2)
    assert not by_five.applicable


def test_lemma_imp2_single_class_and_scope():
    A = IntSet([0, 15, 30])
    assert not lemma_imp2_check(build_context(A, 15), A, 1).applicable
    with pytest.raises(OutOfScopeError):
        lemma_imp2_check(build_context(A, 9), A, 1)


def test_evaluate_bound_registry(small_ap):
    assert "full_classes" in BOUND_NAMES
    [report] = evaluate_bound("cor33", small_ap, 3)
    assert report.actual == 14
    lemma = evaluate_bound("2full", small_ap, 3)
    assert len(lemma) == 3
    with pytest.raises(UnknownBoundError):
        evaluate_bound("chowla", small_ap, 3)
    with pytest.raises(UnknownBoundError):
        evaluate_bound("nope", small_ap, 3)


def test_oracle_confirmation(small_ap):
    fake = BoundReport.build("thm", actual=14, bound=100, k=3, size=4)
    assert confirm_with_oracle(fake, small_ap)
    assert not confirm_with_oracle(BoundReport.build("thm", actual=14, bound=10, k=3, size=4), small_ap)
    graph = BoundReport.build("graph", actual=8, bound=9, k=3, size=4)
    assert confirm_with_oracle(graph, small_ap)


@pytest.mark.parametrize("k,n", [(3, 10), (3, 220), (5, 12), (9, 100), (15, 25)])
def test_arithmetic_progression_meets_corollary2_floor(k, n):
    # odd numbers below k are not 2a + kb, nor are their mirror images at the top
    assert two_k_size(ap(n), k) == (k + 2) * n - 2 * k


@pytest.mark.slow
def test_theorem_on_k5_threshold_sets():
    rng = np.random.default_rng(25100)
    for _ in range(5):
        A = IntSet(rng.choice(10**7 + 1, size=25100, replace=False))
        started = time.perf_counter()
        report = theorem_check(A, 5)
        assert time.perf_counter() - started < 10.0
        assert report.hypotheses[0].met
        assert report.satisfied


@pytest.mark.slow
def test_theorem_on_k3_threshold_sets():
    rng = np.random.default_rng(220)
    for _ in range(50):
        A = IntSet(rng.choice(10**5 + 1, size=220, replace=False))
        started = time.perf_counter()
        report = theorem_check(A, 3)
        assert time.perf_counter() - started < 1.0
        assert report.satisfied
