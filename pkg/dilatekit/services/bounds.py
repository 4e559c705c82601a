# dilatekit/services/bounds.py
"""Lower bounds for |n·A + m·B| and |2·A + k·A|, and instance checks of the lemmas behind them.

Bounds are exact Python integers and may be negative. Hypothesis flags never
gate the computation: every report carries the actual cardinality, the bound
and which hypotheses held, so a sweep can tell "held anyway" from "guaranteed".
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Literal, Optional

from ..core.intset import IntSet, LinearForm, dilate, evaluate_form, minkowski_sum, naive_form
from ..errors import (
    ClassIndexError,
    EmptySetError,
    OutOfScopeError,
    PreconditionError,
    SourceMismatchError,
    UnknownBoundError,
)
from .reports import BoundReport, Hypothesis, LemmaPart, LemmaReport
from .residues import ResidueDecomposition, decompose, delta_sizes, residue_count

logger = logging.getLogger(__name__)

Kind = Literal["prime_power", "semiprime", "other"]


def factorize(k: int) -> Dict[int, int]:
    """Trial division; fine for k up to about 10**6."""
    out: Dict[int, int] = {}
    n, p = k, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Factorization:
    k: int
    kind: Kind
    primes: tuple[int, ...] = ()
    alpha: int = 0

    @property
    def odd(self) -> bool:
        return self.k % 2 == 1

    @property
    def in_scope(self) -> bool:
        """Odd prime power or product of two distinct odd primes."""
        return self.odd and self.kind in ("prime_power", "semiprime")


def classify(k: int) -> Factorization:
    if k < 2:
        return Factorization(k, "other")
    f = factorize(k)
    if len(f) == 1:
        (p, alpha), = f.items()
        return Factorization(k, "prime_power", (p,), alpha)
    if len(f) == 2 and all(e == 1 for e in f.values()):
        return Factorization(k, "semiprime", tuple(sorted(f)))
    return Factorization(k, "other", tuple(sorted(f)))


def _require_nonempty(*sets: IntSet) -> None:
    for s in sets:
        if s.is_empty():
            raise EmptySetError("bound checks need nonempty sets")


def _require_odd_k(k: int) -> None:
    if k < 3 or k % 2 == 0:
        raise PreconditionError("k_odd", f"k = {k} must be odd and >= 3", element=k)


def two_k_size(A: IntSet, k: int, method: str = "auto") -> int:
    """|2·A + k·A|."""
    return len(evaluate_form(LinearForm((2, k)), A, method))


# ---------------------------------------------------------------------------
# Set bounds
# ---------------------------------------------------------------------------

def prop_l_check(n: int, m: int, A: IntSet, B: IntSet) -> BoundReport:
    """|n·A + m·B| >= c_n(B)|A| + c_m(A)|B| - c_m(A)c_n(B) for coprime n, m."""
    if n < 1 or m < 1:
        raise PreconditionError("positive_moduli", f"n = {n}, m = {m} must be >= 1")
    g = math.gcd(n, m)
    if g != 1:
        raise PreconditionError("coprime", f"gcd({n}, {m}) = {g}", element=g)
    _require_nonempty(A, B)
    actual = len(minkowski_sum(dilate(A, n), dilate(B, m)))
    cn_b, cm_a = residue_count(B, n), residue_count(A, m)
    bound = cn_b * len(A) + cm_a * len(B) - cm_a * cn_b
    return BoundReport.build("prop32", actual, bound, [Hypothesis(name="coprime", met=True)], k=m, size=len(A))


def corollary1_check(n: int, m: int, A: IntSet) -> BoundReport:
    """|n·A + m·A| >= 4|A| - 4 for coprime 2 <= n < m (B read as A)."""
    if not 2 <= n < m:
        raise PreconditionError("ordered_moduli", f"need 2 <= n < m, got n = {n}, m = {m}")
    g = math.gcd(n, m)
    if g != 1:
        raise PreconditionError("coprime", f"gcd({n}, {m}) = {g}", element=g)
    _require_nonempty(A)
    actual = len(minkowski_sum(dilate(A, n), dilate(A, m)))
    return BoundReport.build("cor33", actual, 4 * len(A) - 4, [Hypothesis(name="coprime", met=True)],
                             k=m, size=len(A))


def corollary2_check(k: int, A: IntSet) -> BoundReport:
    """|2·A + k·A| >= (k+2)|A| - 2k when c_k(A) = k."""
    _require_odd_k(k)
    _require_nonempty(A)
    hyps = [Hypothesis(name="full_projection", met=residue_count(A, k) == k)]
    return BoundReport.build("cor34", two_k_size(A, k), (k + 2) * len(A) - 2 * k, hyps, k=k, size=len(A))


def theorem_bound(k: int, size: int) -> int:
    return (k + 2) * size - k * k - k + 2


def theorem_check(A: IntSet, k: int, d: Optional[ResidueDecomposition] = None) -> BoundReport:
    """|2·A + k·A| >= (k+2)|A| - k^2 - k + 2, proven for |A| > 8k^k and k an odd prime power or semiprime."""
    _require_odd_k(k)
    _require_nonempty(A)
    d = d or decompose(A, k)
    hyps = [
        Hypothesis(name="size_threshold_met", met=len(A) > 8 * k**k),
        Hypothesis(name="largest_class_threshold_met", met=d[1].size > 8 * k ** (k - 1)),
        Hypothesis(name="k_in_scope", met=classify(k).in_scope),
    ]
    return BoundReport.build("thm", two_k_size(A, k), theorem_bound(k, len(A)), hyps, k=k, size=len(A))


def lemma_da_check(A: IntSet, k: int) -> BoundReport:
    """|2·A + k·A| >= (k+2)|A| - 4k^(k-1)."""
    fac = classify(k)
    if not fac.in_scope:
        raise OutOfScopeError("k_in_scope", f"k = {k} is not an odd prime power or odd semiprime", element=k)
    _require_nonempty(A)
    bound = (k + 2) * len(A) - 4 * k ** (k - 1)
    return BoundReport.build("da", two_k_size(A, k), bound, [Hypothesis(name="k_in_scope", met=True)],
                             k=k, size=len(A))


def lemma_graph_check(A: IntSet, k: int, ctx: Optional["AnalysisContext"] = None) -> BoundReport:
    """Σ|Δ_ii| >= j(j-1)."""
    _require_nonempty(A)
    deltas = ctx.deltas if ctx is not None else tuple(delta_sizes(decompose(A, k)))
    j = len(deltas)
    return BoundReport.build("graph", sum(deltas), j * (j - 1), k=k, size=len(A))


def full_classes_check(A: IntSet, k: int, ctx: Optional["AnalysisContext"] = None) -> BoundReport:
    """|2·A + k·A| >= (k+2)|A| - j(2k - j + 1) when every class projects onto Z/kZ."""
    _require_odd_k(k)
    _require_nonempty(A)
    d = ctx.decomposition if ctx is not None else decompose(A, k)
    j = d.j
    hyps = [Hypothesis(name="e_empty", met=not d.e_indices)]
    return BoundReport.build("full_classes", two_k_size(A, k), (k + 2) * len(A) - j * (2 * k - j + 1),
                             hyps, k=k, size=len(A))


def chain_gap(k: int) -> int:
    """(k+2)|A| - 2k minus theorem_bound(k, |A|), i.e. (k - 2)(k + 1) >= 0 for every k >= 2."""
    return k * k - k - 2


# ---------------------------------------------------------------------------
# Analysis context and lemma predicates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisContext:
    k: int
    factorization: Factorization
    decomposition: ResidueDecomposition
    deltas: tuple[int, ...]
    p: Optional[int]
    m_index: Optional[int]
    n_index: Optional[int]

    @property
    def q(self) -> Optional[int]:
        if self.factorization.kind != "semiprime" or self.p is None:
            return None
        return self.k // self.p

    def delta(self, i: int) -> int:
        if not 1 <= i <= len(self.deltas):
            raise ClassIndexError(f"class index {i} outside 1..{len(self.deltas)}")
        return self.deltas[i - 1]


def build_context(A: IntSet, k: int, p: Optional[int] = None, n_jobs: int = 1) -> AnalysisContext:
    d = decompose(A, k)
    fac = classify(k)
    if p is None:
        p = fac.primes[0] if fac.primes else None
    elif k % p:
        raise PreconditionError("p_divides_k", f"{p} does not divide {k}", element=p)
    deltas = tuple(delta_sizes(d, n_jobs))
    m_index = None
    if p is not None:
        m_index = next((c.index for c in d.classes if c.residue % p), None)
    n_index = next((c.index for c in d.classes
                    if c.index in d.e_indices and deltas[c.index - 1] < c.size), None)
    return AnalysisContext(k, fac, d, deltas, p, m_index, n_index)


def class_profile(ctx: AnalysisContext) -> List[dict]:
    """Per class: |2·X_i + k·X_i| and |Δ_ii|; for odd k these add up to |2·A + k·A|."""
    d, k = ctx.decomposition, ctx.k
    rows = []
    for c in d.classes:
        rows.append({
            "index": c.index,
            "residue": c.residue,
            "size": c.size,
            "own": two_k_size(c.quotient, k),
            "delta": ctx.deltas[c.index - 1],
            "in_E": c.index in d.e_indices,
            "in_E_literal": c.index in d.e_literal,
        })
    return rows


def _check_source(ctx: AnalysisContext, A: IntSet) -> None:
    if A != ctx.decomposition.source:
        raise SourceMismatchError("lemma check needs the set the context was built from")


def _prime_power_scope(ctx: AnalysisContext) -> None:
    if not (ctx.factorization.kind == "prime_power" and ctx.factorization.odd):
        raise OutOfScopeError("k_prime_power", f"k = {ctx.k} is not an odd prime power", element=ctx.k)


def lemma_2full_check(ctx: AnalysisContext, A: IntSet, i: int) -> LemmaReport:
    """|Δ_ii| < |A_i|  =>  c_2(A_i) = 2, given gcd(A) = 1 and 0 in A."""
    _prime_power_scope(ctx)
    _check_source(ctx, A)
    cls = ctx.decomposition[i]
    c2 = residue_count(cls.elements, 2)
    hyps = [Hypothesis(name="gcd_one", met=A.gcd() == 1), Hypothesis(name="zero_in_A", met=0 in A)]
    part = LemmaPart(name="both_parities", active=ctx.delta(i) < cls.size, value=c2, threshold=2, holds=c2 == 2)
    return LemmaReport(lemma="2full", k=ctx.k, class_index=i, applicable=True, hypotheses=hyps, parts=[part])


def lemma_imp_check(ctx: AnalysisContext, A: IntSet, i: int) -> LemmaReport:
    """For i in E\\{m}: p | u_i => |Δ_ii| >= |A_m|; u_l = 0 and p ∤ u_i => |Δ_ii| >= |A_l|."""
    _prime_power_scope(ctx)
    _check_source(ctx, A)
    d, p, m = ctx.decomposition, ctx.p, ctx.m_index
    cls = d[i]
    if m is None:
        return LemmaReport(lemma="imp", k=ctx.k, class_index=i, applicable=False,
                           reason="every residue is divisible by p")
    if i == m or i not in d.e_indices:
        raise PreconditionError("i_in_E_minus_m", f"class {i} is not in E \\ {{{m}}}", element=i)
    delta = ctx.delta(i)
    hyps = [Hypothesis(name="gcd_one", met=A.gcd() == 1)]
    size_m = d[m].size
    parts = [LemmaPart(name="part_i", active=cls.residue % p == 0, value=delta, threshold=size_m,
                       holds=delta >= size_m)]
    zero_cls = next((c for c in d.classes if c.residue == 0), None)
    if zero_cls is not None:
        parts.append(LemmaPart(name="part_ii", active=cls.residue % p != 0, value=delta,
                               threshold=zero_cls.size, holds=delta >= zero_cls.size))
    return LemmaReport(lemma="imp", k=ctx.k, class_index=i, applicable=True, hypotheses=hyps, parts=parts)


def lemma_imp2_check(ctx: AnalysisContext, A: IntSet, i: int) -> LemmaReport:
    """The k = pq case table bounding |Δ_ii| for i in E, split on gcd(u_2, k)."""
    fac = ctx.factorization
    if not (fac.kind == "semiprime" and fac.odd):
        raise OutOfScopeError("k_semiprime", f"k = {ctx.k} is not a product of two distinct odd primes",
                              element=ctx.k)
    _check_source(ctx, A)
    d, k, p, q = ctx.decomposition, ctx.k, ctx.p, ctx.q

    def na(reason: str) -> LemmaReport:
        return LemmaReport(lemma="imp2", k=k, class_index=i, applicable=False, reason=reason)

    if d.j < 2:
        return na("only one residue class")
    if not 1 <= i <= d.j:
        raise ClassIndexError(f"class index {i} outside 1..{d.j}")
    if i not in d.e_indices:
        raise PreconditionError("i_in_E", f"class {i} is not in E", element=i)
    hyps = [
        Hypothesis(name="gcd_one", met=A.gcd() == 1),
        Hypothesis(name="u1_zero", met=d[1].residue == 0),
    ]
    a1, a2 = d[1].size, d[2].size
    g = math.gcd(d[2].residue, k)
    if g == 1:
        row, threshold = ("coprime_i_eq_2", a1) if i == 2 else ("coprime_i_ne_2", a2)
    elif g == p:
        m = ctx.m_index
        if m is None:
            return na("every residue is divisible by p")
        qam = q * d[m].size
        if i == 1:
            row, threshold = "p_i_eq_1", min(a2, qam)
        elif i < m:
            row, threshold = "p_i_below_m", min(a1, qam)
        elif i == m:
            row, threshold = "p_i_eq_m", a2
        else:
            row, threshold = "p_i_above_m", min(a1, a2, qam)
    else:
        return na(f"gcd(u_2, k) = {g} is neither 1 nor p = {p}")
    delta = ctx.delta(i)
    part = LemmaPart(name=row, active=True, value=delta, threshold=threshold, holds=delta >= threshold)
    return LemmaReport(lemma="imp2", k=k, class_index=i, applicable=True, hypotheses=hyps, parts=[part])


def lemma_reports(name: str, ctx: AnalysisContext, A: IntSet) -> List[LemmaReport]:
    """Every class index the lemma speaks about, for one context."""
    d = ctx.decomposition
    if name == "2full":
        return [lemma_2full_check(ctx, A, c.index) for c in d.classes]
    if name == "imp":
        if ctx.m_index is None:
            return [lemma_imp_check(ctx, A, 1)]
        return [lemma_imp_check(ctx, A, i) for i in sorted(d.e_indices) if i != ctx.m_index]
    if name == "imp2":
        if d.j < 2:
            return [lemma_imp2_check(ctx, A, 1)]
        return [lemma_imp2_check(ctx, A, i) for i in sorted(d.e_indices)]
    raise UnknownBoundError(f"unknown lemma predicate '{name}'")


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SetBound = Callable[[IntSet, int], BoundReport]

SET_BOUNDS: Dict[str, SetBound] = {
    "prop32": lambda A, k: prop_l_check(2, k, A, A),
    "cor33": lambda A, k: corollary1_check(2, k, A),
    "cor34": lambda A, k: corollary2_check(k, A),
    "thm": theorem_check,
    "da": lemma_da_check,
    "graph": lemma_graph_check,
    "full_classes": full_classes_check,
}
LEMMA_PREDICATES = ("2full", "imp", "imp2")
MODULAR_LEMMAS = ("chowla", "l6", "l8")
BOUND_NAMES = tuple(SET_BOUNDS) + LEMMA_PREDICATES + MODULAR_LEMMAS


def require_known(name: str) -> str:
    if name not in BOUND_NAMES:
        raise UnknownBoundError(f"unknown bound '{name}'; known: {', '.join(BOUND_NAMES)}")
    return name


def lemma_contexts(name: str, A: IntSet, k: int, n_jobs: int = 1) -> List[AnalysisContext]:
    if name == "imp2":
        return [build_context(A, k, p, n_jobs) for p in classify(k).primes]
    return [build_context(A, k, n_jobs=n_jobs)]


def evaluate_bound(name: str, A: IntSet, k: int, n_jobs: int = 1) -> List[BoundReport] | List[LemmaReport]:
    """Reports for one named bound on (A, k); modular lemmas are sweep-only."""
    require_known(name)
    if name in SET_BOUNDS:
        return [SET_BOUNDS[name](A, k)]
    if name in LEMMA_PREDICATES:
        return [r for ctx in lemma_contexts(name, A, k, n_jobs) for r in lemma_reports(name, ctx, A)]
    raise UnknownBoundError(f"'{name}' is a modular lemma; run it through the verify sweeps")


def confirm_with_oracle(report: BoundReport, A: IntSet) -> bool:
    """Recompute a reported violation with the pairwise oracle; True if it stands."""
    k = report.k
    if report.bound_name == "graph":
        total = 0
        for c in decompose(A, k).classes:
            two_ai = dilate(c.elements, 2)
            gained = minkowski_sum(two_ai, dilate(A, k), "naive")
            own = minkowski_sum(two_ai, dilate(c.elements, k), "naive")
            total += len(gained.difference(own))
        return total < report.bound
    # every other set bound in the registry measures |2·A + k·A|
    return len(naive_form(LinearForm((2, k)), A)) < report.bound


__all__ = [
    "AnalysisContext",
    "BOUND_NAMES",
    "Factorization",
    "build_context",
    "chain_gap",
    "class_profile",
    "classify",
    "confirm_with_oracle",
    "corollary1_check",
    "corollary2_check",
    "evaluate_bound",
    "factorize",
    "full_classes_check",
    "lemma_2full_check",
    "lemma_da_check",
    "lemma_graph_check",
    "lemma_imp2_check",
    "lemma_contexts",
    "lemma_imp_check",
    "lemma_reports",
    "prop_l_check",
    "theorem_bound",
    "theorem_check",
]
