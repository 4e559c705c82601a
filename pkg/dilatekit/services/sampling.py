# dilatekit/services/sampling.py
"""Candidate sets: seeded random subsets and lexicographic subset families."""
from __future__ import annotations

import itertools
import math
import secrets
from typing import Iterator, Optional

import numpy as np

from ..core.intset import IntSet


def resolve_seed(seed: Optional[int]) -> int:
    """An explicit seed, or a fresh 63-bit one that the caller must echo."""
    return seed if seed is not None else secrets.randbits(63)


def random_subset(seed: int, counter: int, universe: int, size: int) -> IntSet:
    """Uniform size-subset of [0, universe), a pure function of (seed, counter)."""
    rng = np.random.default_rng([seed, counter])
    return IntSet(rng.choice(universe, size=size, replace=False))


def subsets_with_first(first: int, universe: int, size: int) -> Iterator[tuple[int, ...]]:
    """Every size-subset of [0, universe) whose minimum is `first`, in lexicographic order."""
    if size == 1:
        yield (first,)
        return
    for rest in itertools.combinations(range(first + 1, universe), size - 1):
        yield (first,) + rest


def normalized_with_second(second: int, universe: int, size: int) -> Iterator[tuple[int, ...]]:
    """Subsets {0, second, ...} of [0, universe) with gcd 1."""
    for rest in subsets_with_first(second, universe, size - 1):
        if math.gcd(*rest) == 1:
            yield (0,) + rest


def subset_count(universe: int, size: int) -> int:
    return math.comb(universe, size)
