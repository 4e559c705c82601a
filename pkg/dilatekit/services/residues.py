# dilatekit/services/residues.py
"""Residue-class decomposition of A modulo k.

A splits into classes A_i = k·X_i + u_i (0 <= u_i < k), ordered by size
descending and, on ties, by residue ascending. A class index i is in F when
the quotient X_i hits every residue mod k and in E otherwise; the literal
reading (|X_i| < k vs |X_i| = k) is kept alongside.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.intset import IntSet, dilate, minkowski_sum
from ..errors import ClassIndexError, EmptySetError, InvalidModulusError, SourceMismatchError
from .modular import ModSet
from .workers import parallel_map

logger = logging.getLogger(__name__)


def project_mod(A: IntSet, n: int) -> ModSet:
    if n < 2:
        raise InvalidModulusError(f"projection modulus must be >= 2, got {n}")
    if A.is_empty():
        raise EmptySetError("project_mod needs a nonempty set")
    return ModSet.of(n, np.unique(A.residues(n)).tolist())


def residue_count(A: IntSet, n: int) -> int:
    """c_n(A); c_1(A) = 1 for nonempty A."""
    if n == 1 and not A.is_empty():
        return 1
    return len(project_mod(A, n))


@dataclass(frozen=True)
class CongruenceClass:
    index: int
    residue: int
    quotient: IntSet
    elements: IntSet

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class ResidueDecomposition:
    modulus: int
    classes: tuple[CongruenceClass, ...]
    e_indices: frozenset[int]
    f_indices: frozenset[int]
    e_literal: frozenset[int]
    f_literal: frozenset[int]
    source: IntSet = field(repr=False)

    @property
    def j(self) -> int:
        return len(self.classes)

    def __getitem__(self, i: int) -> CongruenceClass:
        """1-based, matching A_1, ..., A_j."""
        if not 1 <= i <= self.j:
            raise ClassIndexError(f"class index {i} outside 1..{self.j}")
        return self.classes[i - 1]

    @property
    def residues(self) -> list[int]:
        return [c.residue for c in self.classes]

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def split(self, reading: str = "projection") -> tuple[frozenset[int], frozenset[int]]:
        if reading == "literal":
            return self.e_literal, self.f_literal
        return self.e_indices, self.f_indices

    def to_dict(self, reading: str = "projection", threshold: Optional[int] = None) -> dict:
        """JSON shape of the `decompose` command; element lists dropped above threshold."""
        e, f = self.split(reading)
        classes = []
        for c in self.classes:
            row = {"residue": c.residue, "size": c.size}
            if threshold is None or c.size <= threshold:
                row["elements"] = c.elements.to_list()
                row["quotient"] = c.quotient.to_list()
            classes.append(row)
        return {"k": self.modulus, "j": self.j, "classes": classes, "E": sorted(e), "F": sorted(f)}


def decompose(A: IntSet, k: int) -> ResidueDecomposition:
    if k < 2:
        raise InvalidModulusError(f"decomposition modulus must be >= 2, got {k}")
    if A.is_empty():
        raise EmptySetError("decompose needs a nonempty set")
    arr = A.elements
    res = A.residues(k)
    groups = []
    for u in np.unique(res).tolist():
        members = arr[res == u]
        groups.append((u, members))
    groups.sort(key=lambda g: (-len(g[1]), g[0]))

    classes = []
    e, f, e_lit, f_lit = set(), set(), set(), set()
    for i, (u, members) in enumerate(groups, start=1):
        quotient = IntSet._from_sorted((members - u) // k)
        classes.append(CongruenceClass(i, u, quotient, IntSet._from_sorted(members)))
        (f if residue_count(quotient, k) == k else e).add(i)
        if len(quotient) < k:
            e_lit.add(i)
        elif len(quotient) == k:
            f_lit.add(i)
    return ResidueDecomposition(
        modulus=k,
        classes=tuple(classes),
        e_indices=frozenset(e),
        f_indices=frozenset(f),
        e_literal=frozenset(e_lit),
        f_literal=frozenset(f_lit),
        source=A,
    )


@dataclass(frozen=True)
class DeltaSet:
    class_index: int
    elements: IntSet

    def __len__(self) -> int:
        return len(self.elements)


def _delta(A_i: IntSet, A: IntSet, k: int) -> IntSet:
    two_ai = dilate(A_i, 2)
    gained = minkowski_sum(two_ai, dilate(A, k))
    own = minkowski_sum(two_ai, dilate(A_i, k))
    return gained.difference(own)


def _delta_size(A_i: IntSet, A: IntSet, k: int) -> int:
    return len(_delta(A_i, A, k))


def delta_set(d: ResidueDecomposition, i: int, A: IntSet) -> DeltaSet:
    """Δ_ii = (2·A_i + k·A) \\ (2·A_i + k·A_i)."""
    cls = d[i]
    if A != d.source:
        raise SourceMismatchError("delta_set needs the set the decomposition was built from")
    return DeltaSet(i, _delta(cls.elements, A, d.modulus))


def delta_sizes(d: ResidueDecomposition, n_jobs: int = 1) -> list[int]:
    """|Δ_ii| for i = 1..j; classes are independent, so they may run in parallel."""
    A, k = d.source, d.modulus
    if d.j < 4:
        n_jobs = 1
    return parallel_map(_delta_size, [(c.elements, A, k) for c in d.classes], n_jobs, desc="deltas")
