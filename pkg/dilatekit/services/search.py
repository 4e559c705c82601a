# dilatekit/services/search.py
"""Extremal search for min |2·A + k·A| at fixed |A|, counterexample hunts and margin tables."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Literal, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field, model_validator

from ..core.intset import IntSet, normalize_set
from ..core.kernels import shift_or_count
from ..errors import BudgetExceededError, ConfigError, PreconditionError
from ..settings import get_settings
from .bounds import MODULAR_LEMMAS, SET_BOUNDS, chain_gap, require_known, theorem_bound, two_k_size
from .reports import BoundReport, SweepSummary
from .sampling import normalized_with_second, random_subset, resolve_seed, subset_count, subsets_with_first
from .sweeps import evaluate_set, exhaustive_sweep, random_sweep, verify_chowla, verify_l6, verify_l8
from .workers import chunk_ranges, parallel_map, task_count

logger = logging.getLogger(__name__)

Mode = Literal["exhaustive", "random", "structured"]
Family = Literal["ap", "ap_gap", "two_ap", "sparse"]
FAMILIES: tuple[str, ...] = ("ap", "ap_gap", "two_ap", "sparse")


# ---------------------------------------------------------------------------
# Structured families
# ---------------------------------------------------------------------------

def family_member(family: str, n: int, k: int, s: Optional[int] = None, r: int = 1) -> IntSet:
    """One n-element member of a structured family."""
    if n < 1:
        raise ConfigError(f"family sets need n >= 1, got {n}")
    if family == "ap":
        return IntSet.interval(0, n)
    if family == "ap_gap":
        return IntSet(list(range(n - 1)) + [n - 2 + k])
    if family == "two_ap":
        if n < 2:
            return IntSet([0])
        s = math.ceil(n / 2) if s is None else s
        if not 1 <= s <= n - 1 or r % k == 0:
            raise ConfigError(f"two_ap needs 1 <= s <= n - 1 and r not divisible by k, got s={s}, r={r}")
        return IntSet([k * t for t in range(s)] + [k * t + r for t in range(n - s)])
    if family == "sparse":
        return IntSet((1 << i) - 1 for i in range(n))
    raise ConfigError(f"unknown family '{family}'; known: {', '.join(FAMILIES)}")


def family_members(family: str, n: int, k: int) -> Iterator[IntSet]:
    """Every member the structured search scans for one family and size."""
    if family == "two_ap" and n >= 2:
        for s in range(1, n):
            for r in range(1, k):
                yield family_member(family, n, k, s, r)
    else:
        yield family_member(family, n, k)


def margin_profile(k: int, sizes: Sequence[int], family: str = "ap") -> pd.DataFrame:
    """Per n: |2·A + k·A| of the family member and its margin over theorem_bound(k, n)."""
    rows = []
    for n in sizes:
        A = family_member(family, n, k)
        actual = two_k_size(A, k)
        bound = theorem_bound(k, n)
        if family == "ap" and k % 2 and n >= k and actual - bound != chain_gap(k):
            raise AssertionError(f"interval of size {n} has margin {actual - bound}, expected {chain_gap(k)}")
        rows.append({"n": n, "actual": actual, "theorem_bound": bound, "margin": actual - bound})
    return pd.DataFrame(rows, columns=["n", "actual", "theorem_bound", "margin"])


# ---------------------------------------------------------------------------
# Specs and results
# ---------------------------------------------------------------------------

class SearchSpec(BaseModel):
    k: int = Field(ge=2)
    set_size: int = Field(ge=1)
    universe_bound: int = Field(ge=1)
    mode: Mode = "exhaustive"
    samples: int = Field(default=100, ge=1)
    seed: Optional[int] = None
    budget: Optional[int] = Field(default=None, ge=1)
    witness_cap: Optional[int] = Field(default=None, ge=1)
    normalize: bool = True
    families: List[Family] = Field(default_factory=lambda: list(FAMILIES))

    @model_validator(mode="after")
    def _fits(self):
        if self.mode != "structured" and self.set_size > self.universe_bound:
            raise ValueError(f"set_size {self.set_size} exceeds universe_bound {self.universe_bound}")
        return self

    def resolved(self) -> "SearchSpec":
        """Fill seed, budget and witness cap so the spec fully determines the run."""
        settings = get_settings()
        return self.model_copy(update={
            "seed": resolve_seed(self.seed) if self.mode == "random" else self.seed,
            "budget": self.budget or settings.search_budget,
            "witness_cap": self.witness_cap or settings.witness_cap,
        })


class SearchResult(BaseModel):
    spec: SearchSpec
    minimum: int
    witnesses: List[List[int]]
    witnesses_truncated: bool = False
    instances_examined: int
    bound_comparison: Optional[BoundReport] = None
    cross_checks: List[BoundReport] = []


@dataclass
class _Partial:
    minimum: Optional[int] = None
    witnesses: List[tuple[int, ...]] = field(default_factory=list)
    truncated: bool = False
    examined: int = 0

    def offer(self, size: int, witness: tuple[int, ...], cap: int) -> None:
        self.examined += 1
        if self.minimum is None or size < self.minimum:
            self.minimum, self.witnesses, self.truncated = size, [witness], False
        elif size == self.minimum and witness not in self.witnesses:
            if len(self.witnesses) < cap:
                self.witnesses.append(witness)
            else:
                self.truncated = True


def _two_k_count(values: Sequence[int], k: int) -> int:
    return shift_or_count([2 * a for a in values], [k * a for a in values])


def _normalized(values: Sequence[int]) -> tuple[int, ...]:
    return tuple(normalize_set(IntSet(values)).normalized)


def _exhaustive_chunk(k: int, n: int, N: int, start: int, normalize: bool, cap: int) -> _Partial:
    part = _Partial()
    if normalize:
        combos = [(0,)] if n == 1 else normalized_with_second(start, N, n)
    else:
        combos = subsets_with_first(start, N, n)
    for combo in combos:
        size = _two_k_count(combo, k)
        witness = combo if normalize else _normalized(combo)
        part.offer(size, witness, cap)
    return part


def _random_chunk(k: int, n: int, N: int, seed: int, lo: int, hi: int, cap: int) -> _Partial:
    part = _Partial()
    for counter in range(lo, hi):
        values = random_subset(seed, counter, N, n).to_list()
        part.offer(_two_k_count(values, k), _normalized(values), cap)
    return part


def _merge(parts: Sequence[_Partial], cap: int) -> _Partial:
    found = [p for p in parts if p.minimum is not None]
    out = _Partial(examined=sum(p.examined for p in parts))
    if not found:
        return out
    out.minimum = min(p.minimum for p in found)
    for p in found:
        if p.minimum != out.minimum:
            continue
        out.truncated |= p.truncated
        for w in p.witnesses:
            if w in out.witnesses:
                continue
            if len(out.witnesses) < cap:
                out.witnesses.append(w)
            else:
                out.truncated = True
    return out


def candidate_count(spec: SearchSpec) -> int:
    """Candidates an exhaustive run enumerates (before the gcd filter in normalized mode)."""
    if spec.normalize:
        return subset_count(spec.universe_bound - 1, spec.set_size - 1)
    return subset_count(spec.universe_bound, spec.set_size)


def applicable_reports(A: IntSet, k: int) -> List[BoundReport]:
    """Every registry set bound that accepts (A, k)."""
    out = []
    for name, check in SET_BOUNDS.items():
        try:
            out.append(check(A, k))
        except PreconditionError:
            continue
    return out


def extremal_min(spec: SearchSpec, n_jobs: int = 1, progress: bool = False) -> SearchResult:
    spec = spec.resolved()
    k, n, N, cap = spec.k, spec.set_size, spec.universe_bound, spec.witness_cap
    started = time.perf_counter()
    logger.info("extremal search k=%d n=%d N=%d mode=%s", k, n, N, spec.mode)
    if spec.mode == "exhaustive":
        count = candidate_count(spec)
        if count > spec.budget:
            raise BudgetExceededError(count, spec.budget)
        if spec.normalize:
            starts = [1] if n == 1 else range(1, N)
        else:
            starts = range(N)
        tasks = [(k, n, N, s, spec.normalize, cap) for s in starts]
        parts = parallel_map(_exhaustive_chunk, tasks, n_jobs, progress, "extremal")
    elif spec.mode == "random":
        if spec.samples > spec.budget:
            raise BudgetExceededError(spec.samples, spec.budget)
        tasks = [(k, n, N, spec.seed, lo, hi, cap)
                 for lo, hi in chunk_ranges(0, spec.samples, task_count(n_jobs))]
        parts = parallel_map(_random_chunk, tasks, n_jobs, progress, "extremal")
    else:
        part = _Partial()
        for family in spec.families:
            for A in family_members(family, n, k):
                part.offer(two_k_size(A, k), tuple(normalize_set(A).normalized), cap)
        parts = [part]
    merged = _merge(parts, cap)
    if merged.minimum is None:
        raise PreconditionError("candidates_exist", f"no candidate set of size {n} in [0, {N})")
    witness = IntSet(merged.witnesses[0])
    checks = applicable_reports(witness, k)
    for r in checks:
        # every set bound except graph measures |2·A + k·A|
        if r.bound_name != "graph" and r.actual != merged.minimum:
            raise AssertionError(f"{r.bound_name} recomputed {r.actual}, search found {merged.minimum}")
        if r.violated:
            logger.warning("witness %s violates %s: %d < %d", witness, r.bound_name, r.actual, r.bound)
    met = [r for r in checks if r.hypotheses_met and r.bound_name != "graph"]
    best = max(met, key=lambda r: r.bound) if met else None
    logger.info("extremal search done: minimum %d over %d sets (%.2fs)", merged.minimum, merged.examined,
                time.perf_counter() - started)
    return SearchResult(
        spec=spec,
        minimum=merged.minimum,
        witnesses=[list(w) for w in merged.witnesses],
        witnesses_truncated=merged.truncated,
        instances_examined=merged.examined,
        bound_comparison=best,
        cross_checks=checks,
    )


def hunt_counterexamples(spec: SearchSpec, bound_name: str, sizes: Optional[Sequence[int]] = None,
                         n_jobs: int = 1, progress: bool = False,
                         ignore_hypotheses: bool = False) -> SweepSummary:
    """Instances where the named bound fails with its hypotheses met, plus the smallest margin seen.

    Modular lemmas delegate to their sweeps, reading universe_bound as the
    largest modulus (chowla, l6) and k as the modulus (l8).
    """
    require_known(bound_name)
    if bound_name in MODULAR_LEMMAS:
        if bound_name == "chowla":
            return verify_chowla(spec.universe_bound, n_jobs, progress)
        if bound_name == "l6":
            return verify_l6(spec.universe_bound, n_jobs, progress)
        return verify_l8((spec.k,), n_jobs, progress)
    spec = spec.resolved()
    sizes = list(sizes) if sizes else [spec.set_size]
    if spec.mode == "exhaustive":
        count = sum(subset_count(spec.universe_bound, n) for n in sizes)
        if count > spec.budget:
            raise BudgetExceededError(count, spec.budget)
        return exhaustive_sweep([bound_name], [spec.k], spec.universe_bound, n_jobs, progress,
                                ignore_hypotheses, sizes)[bound_name]
    if spec.mode == "random":
        return random_sweep([bound_name], spec.k, sizes, spec.samples, spec.universe_bound, spec.seed,
                            n_jobs, progress, ignore_hypotheses)[bound_name]
    out: Dict[str, SweepSummary] = {bound_name: SweepSummary(lemma=bound_name)}
    for family in spec.families:
        for n in sizes:
            for A in family_members(family, n, spec.k):
                evaluate_set([bound_name], A, spec.k, out, ignore_hypotheses)
    return out[bound_name]
