# dilatekit/services/modular.py
"""Subsets of Z/nZ and the three imported modular lemmas.

Chowla: 0 in B, B\\{0} units  =>  |A+B| >= min(n, |A|+|B|-1).
Stabilizer: A + alpha = A  iff  A is a union of cosets of <gcd(n, alpha)>.
Mixed coprimality: the Chowla bound with one non-unit generator q allowed in B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ..errors import InvalidModulusError, ModulusMismatchError, PreconditionError
from .reports import BoundReport, Hypothesis


@dataclass(frozen=True)
class ModSet:
    """Subset of Z/nZ as a bitmask; bit r set iff residue r is a member."""

    modulus: int
    mask: int

    def __post_init__(self):
        if self.modulus < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {self.modulus}")
        if self.mask < 0 or self.mask >> self.modulus:
            raise ValueError(f"mask has bits outside Z/{self.modulus}Z")

    @classmethod
    def of(cls, n: int, residues: Iterable[int]) -> "ModSet":
        if n < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {n}")
        mask = 0
        for r in residues:
            mask |= 1 << (int(r) % n)
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "ModSet":
        return cls(n, (1 << n) - 1)

    @property
    def full_mask(self) -> int:
        return (1 << self.modulus) - 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, r: object) -> bool:
        return isinstance(r, int) and bool(self.mask >> (r % self.modulus) & 1)

    def __iter__(self) -> Iterator[int]:
        m, r = self.mask, 0
        while m:
            if m & 1:
                yield r
            m >>= 1
            r += 1

    def __repr__(self) -> str:
        return f"ModSet(n={self.modulus}, {{{', '.join(map(str, self))}}})"

    def members(self) -> list[int]:
        return list(self)

    def is_full(self) -> bool:
        return self.mask == self.full_mask

    def shift(self, t: int) -> "ModSet":
        """A + t, a cyclic rotation of the mask."""
        n = self.modulus
        t %= n
        if not t:
            return self
        rotated = ((self.mask << t) | (self.mask >> (n - t))) & self.full_mask
        return ModSet(n, rotated)

    def residues_mod(self, d: int) -> tuple[int, ...]:
        """Image under Z/nZ -> Z/dZ as sorted residues; d = 1 gives (0,) for a nonempty set."""
        return tuple(sorted({r % d for r in self}))


def _same_modulus(A: ModSet, B: ModSet) -> int:
    if A.modulus != B.modulus:
        raise ModulusMismatchError(f"moduli differ: {A.modulus} vs {B.modulus}")
    return A.modulus


def mod_sum(A: ModSet, B: ModSet) -> ModSet:
    """{a + b mod n}."""
    n = _same_modulus(A, B)
    acc = 0
    for b in B:
        acc |= A.shift(b).mask
    return ModSet(n, acc)


def is_unit(b: int, n: int) -> bool:
    return math.gcd(b, n) == 1


def chowla_preconditions(A: ModSet, B: ModSet) -> None:
    """Raise PreconditionError naming the first violated Chowla hypothesis."""
    n = _same_modulus(A, B)
    if not len(A):
        raise PreconditionError("A_nonempty", "A is empty")
    if not len(B):
        raise PreconditionError("B_nonempty", "B is empty")
    if 0 not in B:
        raise PreconditionError("zero_in_B", "0 is not in B")
    for b in B:
        if b and not is_unit(b, n):
            raise PreconditionError("B_units", f"{b} is not coprime to {n}", element=b)


def chowla_check(A: ModSet, B: ModSet) -> BoundReport:
    chowla_preconditions(A, B)
    n = A.modulus
    return BoundReport.build(
        "chowla",
        actual=len(mod_sum(A, B)),
        bound=min(n, len(A) + len(B) - 1),
        hypotheses=[Hypothesis(name="zero_in_B", met=True), Hypothesis(name="B_units", met=True)],
        k=n,
        size=len(A),
    )


@dataclass(frozen=True)
class CosetStructure:
    """A = union over beta in I of (d·{0, ..., n/d - 1} + beta)."""

    d: int
    cosets: tuple[int, ...]

    def reconstruct(self, n: int) -> ModSet:
        mask = 0
        for beta in self.cosets:
            for t in range(n // self.d):
                mask |= 1 << (self.d * t + beta)
        return ModSet(n, mask)


def is_coset_union(A: ModSet, d: int) -> bool:
    """Right-hand side of the stabilizer lemma, tested without computing A + alpha."""
    n = A.modulus
    return CosetStructure(d, A.residues_mod(d)).reconstruct(n) == A and len(A) % (n // d) == 0


def stabilizer_decompose(A: ModSet, alpha: int) -> Optional[CosetStructure]:
    n = A.modulus
    if alpha % n == 0:
        raise PreconditionError("alpha_nonzero", f"alpha is 0 modulo {n}", element=alpha)
    if not len(A):
        raise PreconditionError("A_nonempty", "A is empty")
    if A.shift(alpha) != A:
        return None
    d = math.gcd(n, alpha % n)
    structure = CosetStructure(d, A.residues_mod(d))
    if structure.reconstruct(n) != A or len(A) % (n // d):
        raise AssertionError(f"stabilized set {A} is not a union of cosets of <{d}>")
    return structure


def _is_composite(k: int) -> bool:
    return k > 3 and any(k % p == 0 for p in range(2, math.isqrt(k) + 1))


def lemma8_preconditions(A: ModSet, q: int, B: ModSet) -> int:
    """Check every hypothesis in order; return q reduced modulo k."""
    k = _same_modulus(A, B)
    if k <= 2:
        raise PreconditionError("k_gt_2", f"modulus {k} is not > 2", element=k)
    if not _is_composite(k):
        raise PreconditionError("k_composite", f"modulus {k} is prime", element=k)
    if not len(A):
        raise PreconditionError("A_nonempty", "A is empty")
    q_bar = q % k
    if math.gcd(q_bar, k) == 1:
        raise PreconditionError("q_not_unit", f"q = {q} is coprime to {k}", element=q)
    if 0 not in B:
        raise PreconditionError("zero_in_B", "0 is not in B")
    for b in B:
        if b not in (0, q_bar) and not is_unit(b, k):
            raise PreconditionError("B_members", f"{b} is neither 0, q mod {k}, nor a unit", element=b)
    if len(mod_sum(A, ModSet.of(k, (0, q_bar)))) < len(A) + 1:
        raise PreconditionError("A_moved_by_q", f"|A + {{0, {q_bar}}}| < |A| + 1")
    return q_bar


def lemma8_check(A: ModSet, q: int, B: ModSet) -> BoundReport:
    lemma8_preconditions(A, q, B)
    k = A.modulus
    return BoundReport.build(
        "l8",
        actual=len(mod_sum(A, B)),
        bound=min(k, len(A) + len(B) - 1),
        hypotheses=[
            Hypothesis(name="k_composite", met=True),
            Hypothesis(name="q_not_unit", met=True),
            Hypothesis(name="B_members", met=True),
            Hypothesis(name="A_moved_by_q", met=True),
        ],
        k=k,
        size=len(A),
    )
