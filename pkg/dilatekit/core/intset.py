# dilatekit/core/intset.py
"""Exact finite integer sets: dilation, Minkowski sums, linear forms, normalization.

IntSet keeps a sorted, duplicate-free, read-only int64 array. Every operation
checks its extreme values with Python integers before touching numpy, so a
result that would leave the signed 64-bit range raises IntSetOverflowError
instead of wrapping around.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

from ..errors import EmptySetError, IntSetOverflowError, InvalidFormError
from ..settings import get_settings
from . import kernels
from .kernels import Method

_INT64 = np.iinfo(np.int64)
MACHINE_MIN = int(_INT64.min)
MACHINE_MAX = int(_INT64.max)


def _check_range(lo: int, hi: int, what: str) -> None:
    if lo < MACHINE_MIN or hi > MACHINE_MAX:
        raise IntSetOverflowError(
            f"{what} spans [{lo}, {hi}], outside the 64-bit range [{MACHINE_MIN}, {MACHINE_MAX}]"
        )


class IntSet:
    """Finite set of integers, stored sorted."""

    __slots__ = ("_elements",)

    def __init__(self, elements: Iterable[int] = ()):
        if isinstance(elements, np.ndarray) and elements.dtype.kind in "iu":
            if elements.size and elements.dtype.kind == "u":
                _check_range(0, int(elements.max()), "element")
            arr = np.unique(elements.astype(np.int64))
        else:
            values = [int(e) for e in elements]
            if values:
                _check_range(min(values), max(values), "element")
            arr = np.unique(np.asarray(values, dtype=np.int64))
        arr.flags.writeable = False
        self._elements = arr

    @classmethod
    def _from_sorted(cls, arr: np.ndarray) -> "IntSet":
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.flags.writeable = False
        obj._elements = arr
        return obj

    @classmethod
    def interval(cls, lo: int, hi: int) -> "IntSet":
        """{lo, ..., hi - 1}."""
        _check_range(lo, max(lo, hi - 1), "interval")
        return cls._from_sorted(np.arange(lo, max(lo, hi), dtype=np.int64))

    def __reduce__(self):
        return (IntSet._from_sorted, (np.array(self._elements),))

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    def __len__(self) -> int:
        return int(self._elements.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self._elements.tolist())

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, (int, np.integer)) or not len(self):
            return False
        x = int(x)
        if x < MACHINE_MIN or x > MACHINE_MAX:
            return False
        i = int(np.searchsorted(self._elements, x))
        return i < len(self) and int(self._elements[i]) == x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntSet):
            return NotImplemented
        return np.array_equal(self._elements, other._elements)

    def __hash__(self) -> int:
        return hash(self._elements.tobytes())

    def __repr__(self) -> str:
        if len(self) <= 16:
            return "IntSet({" + ", ".join(map(str, self)) + "})"
        return f"IntSet(size={len(self)}, min={self.min()}, max={self.max()})"

    def to_list(self) -> list[int]:
        return self._elements.tolist()

    def is_empty(self) -> bool:
        return not len(self)

    def _require_nonempty(self, op: str) -> None:
        if not len(self):
            raise EmptySetError(f"{op} needs a nonempty set")

    def min(self) -> int:
        self._require_nonempty("min")
        return int(self._elements[0])

    def max(self) -> int:
        self._require_nonempty("max")
        return int(self._elements[-1])

    def span(self) -> int:
        return self.max() - self.min()

    def gcd(self) -> int:
        """gcd of all elements; 0 for {0}."""
        self._require_nonempty("gcd")
        return int(np.gcd.reduce(np.abs(self._elements)))

    def translate(self, t: int) -> "IntSet":
        if not len(self):
            return self
        _check_range(self.min() + t, self.max() + t, "translate")
        return IntSet._from_sorted(self._elements + np.int64(t))

    def difference(self, other: "IntSet") -> "IntSet":
        return IntSet._from_sorted(np.setdiff1d(self._elements, other._elements, assume_unique=True))

    def union(self, other: "IntSet") -> "IntSet":
        return IntSet._from_sorted(np.union1d(self._elements, other._elements))

    def residues(self, n: int) -> np.ndarray:
        """a mod n for every element, in [0, n) also for negative a."""
        return np.mod(self._elements, n)


@dataclass(frozen=True)
class LinearForm:
    """f(x_1, ..., x_n) = u_1 x_1 + ... + u_n x_n with nonzero integer coefficients."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(u) for u in self.coefficients)
        if not coeffs:
            raise InvalidFormError("a linear form needs at least one coefficient")
        if any(u == 0 for u in coeffs):
            raise InvalidFormError(f"coefficients must be nonzero, got {coeffs}")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def parse(cls, text: str) -> "LinearForm":
        try:
            return cls(tuple(int(tok) for tok in text.split(",") if tok.strip()))
        except ValueError as e:
            if isinstance(e, InvalidFormError):
                raise
            raise InvalidFormError(f"cannot parse linear form '{text}'") from e

    @classmethod
    def binary(cls, m: int, k: int) -> "LinearForm":
        return cls((m, k))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coefficients)

    def __str__(self) -> str:
        return ",".join(map(str, self.coefficients))

    def is_normalized_binary(self) -> bool:
        if len(self.coefficients) != 2:
            return False
        m, k = self.coefficients
        return k >= abs(m) >= 1 and math.gcd(m, k) == 1


def validate_normalized_form(f: LinearForm) -> bool:
    return f.is_normalized_binary()


def dilate(A: IntSet, u: int) -> IntSet:
    """u·A = {u·a : a in A}."""
    if A.is_empty():
        return A
    if u == 0:
        return IntSet._from_sorted(np.zeros(1, dtype=np.int64))
    _check_range(u, u, "coefficient")
    lo, hi = sorted((u * A.min(), u * A.max()))
    _check_range(lo, hi, f"{u}·A")
    arr = A.elements * np.int64(u)
    return IntSet._from_sorted(arr if u > 0 else arr[::-1])


def minkowski_sum(A: IntSet, B: IntSet, method: Method = "auto", window: Optional[int] = None) -> IntSet:
    """A + B = {a + b : a in A, b in B}; empty if either operand is."""
    if A.is_empty() or B.is_empty():
        return IntSet()
    _check_range(A.min() + B.min(), A.max() + B.max(), "A + B")
    if window is None:
        window = get_settings().bitset_window
    return IntSet._from_sorted(kernels.sumset(A.elements, B.elements, method, window))


def evaluate_form(f: LinearForm, A: IntSet, method: Method = "auto", window: Optional[int] = None) -> IntSet:
    """f(A) = u_1·A + ... + u_n·A, folded left through minkowski_sum."""
    if A.is_empty():
        raise EmptySetError("evaluate_form needs a nonempty set")
    coeffs = f.coefficients
    acc = dilate(A, coeffs[0])
    for u in coeffs[1:]:
        acc = minkowski_sum(acc, dilate(A, u), method, window)
    return acc


def form_size(f: LinearForm, A: IntSet, method: Method = "auto") -> int:
    return len(evaluate_form(f, A, method))


def naive_form(f: LinearForm, A: IntSet) -> IntSet:
    """Enumerate every coefficient-weighted tuple. Exponential in len(f); oracle only."""
    if A.is_empty():
        raise EmptySetError("naive_form needs a nonempty set")
    values = A.to_list()
    out = {sum(u * a for u, a in zip(f.coefficients, combo))
           for combo in itertools.product(values, repeat=len(f))}
    return IntSet(out)


class Normalized(NamedTuple):
    normalized: IntSet
    shift: int
    scale: int


def normalize_set(A: IntSet) -> Normalized:
    """A' = (A - min A) / g with g = gcd(A - min A), so 0 in A' and gcd(A') = 1.

    A singleton maps to ({0}, a, 1).
    """
    if A.is_empty():
        raise EmptySetError("normalize_set needs a nonempty set")
    shift = A.min()
    if len(A) == 1:
        return Normalized(IntSet._from_sorted(np.zeros(1, dtype=np.int64)), shift, 1)
    # differences from the minimum may exceed int64 even when A does not
    diffs = [a - shift for a in A]
    scale = math.gcd(*diffs)
    return Normalized(IntSet(d // scale for d in diffs), shift, scale)
