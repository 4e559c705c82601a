import pickle
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilatekit.core import kernels
from dilatekit.core.intset import (
    MACHINE_MAX,
    IntSet,
    LinearForm,
    dilate,
    evaluate_form,
    form_size,
    minkowski_sum,
    naive_form,
    normalize_set,
    validate_normalized_form,
)
from dilatekit.errors import EmptySetError, IntSetOverflowError, InvalidFormError

small_sets = st.lists(st.integers(-10**4, 10**4), min_size=1, max_size=40).map(IntSet)
coefficients = st.integers(-5, 9).filter(lambda u: u != 0)


def test_intset_sorted_and_deduplicated():
    A = IntSet([5, -1, 3, 5, -1])
    assert A.to_list() == [-1, 3, 5]
    assert len(A) == 3
    assert 3 in A and 4 not in A
    assert A.min() == -1 and A.max() == 5 and A.span() == 6


def test_intset_rejects_values_outside_int64():
    with pytest.raises(IntSetOverflowError):
        IntSet([MACHINE_MAX + 1])


def test_intset_pickles_for_worker_processes():
    A = IntSet([0, 4, 9])
    assert pickle.loads(pickle.dumps(A)) == A


def test_gcd_of_zero_singleton_is_zero():
    assert IntSet([0]).gcd() == 0
    assert IntSet([0, 4, 6]).gcd() == 2


@pytest.mark.parametrize("values,u,expected", [
    ([0, 1, 3], 2, [0, 2, 6]),
    ([-1, 2], 1, [-1, 2]),
    ([-1, 2], -3, [-6, 3]),
    ([4, 7], 0, [0]),
])
def test_dilate(values, u, expected):
    assert dilate(IntSet(values), u).to_list() == expected


def test_dilate_overflow_is_reported():
    with pytest.raises(IntSetOverflowError):
        dilate(IntSet([2**62]), 4)


def test_minkowski_sum_examples():
    assert minkowski_sum(IntSet([0, 1]), IntSet([0, 1])).to_list() == [0, 1, 2]
    B = IntSet([-4, 2, 9])
    assert minkowski_sum(IntSet([0]), B) == B
    assert minkowski_sum(IntSet([0, 2, 6]), IntSet([0, 3, 9])).to_list() == [0, 2, 3, 5, 6, 9, 11, 15]
    assert minkowski_sum(IntSet(), B).is_empty()


def test_minkowski_sum_overflow_is_reported():
    with pytest.raises(IntSetOverflowError):
        minkowski_sum(IntSet([2**62]), IntSet([2**62]))


@pytest.mark.parametrize("method", kernels.METHODS)
def test_evaluate_form_examples(method, small_ap):
    f = LinearForm((2, 3))
    assert evaluate_form(f, small_ap, method).to_list() == [0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15]
    assert evaluate_form(LinearForm((1,)), IntSet([5, 7]), method).to_list() == [5, 7]
    assert evaluate_form(f, IntSet([0, 1]), method).to_list() == [0, 2, 3, 5]
    assert form_size(f, small_ap, method) == 14


def test_evaluate_form_needs_nonempty_set():
    with pytest.raises(EmptySetError):
        evaluate_form(LinearForm((2, 3)), IntSet())


def test_auto_method_falls_back_to_merge_above_window():
    A = IntSet([0, 1, 10**6])
    assert minkowski_sum(A, A, window=1000) == minkowski_sum(A, A, "naive")
    assert kernels.choose_method(A.elements, A.elements, 1000) == "merge"


def test_linear_form_validation():
    with pytest.raises(InvalidFormError):
        LinearForm((2, 0))
    with pytest.raises(InvalidFormError):
        LinearForm(())
    with pytest.raises(InvalidFormError):
        LinearForm.parse("2,x")
    assert LinearForm.parse("2, 9").coefficients == (2, 9)


@pytest.mark.parametrize("coeffs,expected", [
    ((2, 9), True),
    ((2, 4), False),
    ((3, 2), False),
    ((-2, 3), True),
    ((1, 2, 3), False),
])
def test_validate_normalized_form(coeffs, expected):
    assert validate_normalized_form(LinearForm(coeffs)) is expected


@pytest.mark.parametrize("values,expected,shift,scale", [
    ([6, 10, 14], [0, 1, 2], 6, 4),
    ([0, 1, 5], [0, 1, 5], 0, 1),
    ([-3, 3], [0, 1], -3, 6),
    ([7], [0], 7, 1),
])
def test_normalize_set(values, expected, shift, scale):
    norm = normalize_set(IntSet(values))
    assert norm.normalized.to_list() == expected
    assert (norm.shift, norm.scale) == (shift, scale)


@settings(max_examples=200, deadline=None)
@given(A=small_sets, u=coefficients, v=coefficients, method=st.sampled_from(kernels.METHODS))
def test_fast_paths_match_pairwise_oracle(A, u, v, method):
    f = LinearForm((u, v))
    assert evaluate_form(f, A, method) == naive_form(f, A)


@settings(deadline=None)
@given(A=small_sets, u=coefficients, v=coefficients)
def test_size_is_invariant_under_normalization(A, u, v):
    f = LinearForm((u, v))
    norm = normalize_set(A)
    assert 0 in norm.normalized
    assert len(norm.normalized) == 1 or norm.normalized.gcd() == 1
    assert form_size(f, A) == form_size(f, norm.normalized)


@given(A=small_sets, u=st.integers(-50, 50), v=st.integers(-50, 50))
def test_dilation_composes(A, u, v):
    assert dilate(dilate(A, u), v) == dilate(A, u * v)
    if u != 0:
        assert len(dilate(A, u)) == len(A)


@settings(deadline=None)
@given(A=small_sets, B=small_sets)
def test_sumset_size_bounds(A, B):
    size = len(minkowski_sum(A, B))
    assert max(len(A), len(B)) <= size <= len(A) * len(B)


def test_large_random_set_uses_packed_path():
    rng = np.random.default_rng(9)
    A = IntSet(rng.choice(10**6, size=10**5, replace=False))
    assert kernels.choose_method(dilate(A, 2).elements, dilate(A, 5).elements, 2**28) in ("bitset", "fft")
    result = evaluate_form(LinearForm((2, 5)), A)
    assert len(result) <= 7 * 10**6
    assert result.max() == 7 * A.max()


def test_span_wider_than_int64_goes_to_merge():
    A = IntSet([-(2**62), 2**62])
    B = IntSet([0])
    assert kernels.choose_method(A.elements, B.elements, 2**28) == "merge"
    assert minkowski_sum(A, B) == A
    # forced dense paths are rerouted rather than allocating the span
    assert minkowski_sum(A, IntSet([0, 1]), "bitset").to_list() == [-(2**62), -(2**62) + 1, 2**62, 2**62 + 1]
    assert minkowski_sum(A, B, "fft") == A


@pytest.mark.parametrize("u,v", [(2, 5), (4, 6), (-3, 5), (6, 9), (1, 7)])
def test_fft_on_strided_operands(u, v):
    A = IntSet([3, 7, 8, 11, 40, 41, 95])
    a, b = dilate(A, u).elements, dilate(A, v).elements
    assert kernels.fft_sumset(a, b).tolist() == kernels.naive_sumset(a, b).tolist()


def test_fft_with_singleton_operand():
    a = np.array([-4, 0, 9], dtype=np.int64)
    assert kernels.fft_sumset(a, np.array([5], dtype=np.int64)).tolist() == [1, 5, 14]


@pytest.mark.parametrize("n,expected", [(1, 1), (7, 8), (11, 12), (13, 15), (17, 18), (1025, 1080)])
def test_fast_fft_lengths(n, expected):
    assert kernels._fast_len(n) == expected


@pytest.mark.slow
def test_large_dilated_sum_under_a_second():
    rng = np.random.default_rng(10)
    A = IntSet(rng.choice(10**6, size=10**5, replace=False))
    started = time.perf_counter()
    result = evaluate_form(LinearForm((2, 5)), A)
    assert time.perf_counter() - started < 1.0
    assert result.min() == 7 * A.min() and result.max() == 7 * A.max()
