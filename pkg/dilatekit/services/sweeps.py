# dilatekit/services/sweeps.py
"""Verification sweeps: every instance of a lemma over a finite family, checked directly.

Instances whose hypotheses fail are counted as vacuous, never as passes. Work
is cut into tasks whose results come back in submission order, so summaries
(violation order included) do not depend on the worker count.
"""
from __future__ import annotations

import logging
import math
import time
from typing import Dict, List, Optional, Sequence

from ..core.intset import IntSet
from ..errors import ConfigError, InvalidModulusError, PreconditionError
from .bounds import (
    LEMMA_PREDICATES,
    SET_BOUNDS,
    build_context,
    classify,
    confirm_with_oracle,
    lemma_reports,
    require_known,
)
from .modular import ModSet, chowla_check, is_coset_union, is_unit, lemma8_check, stabilizer_decompose
from .reports import BoundReport, SweepSummary, Violation
from .sampling import random_subset, subsets_with_first
from .workers import chunk_ranges, parallel_map, task_count

logger = logging.getLogger(__name__)

def _reduce(lemma: str, parts: Sequence[SweepSummary], seed: Optional[int] = None) -> SweepSummary:
    out = SweepSummary(lemma=lemma, seed=seed)
    for part in parts:
        out = out.merge(part)
    return out


def _log_summary(s: SweepSummary, started: float) -> None:
    logger.info("%s: %d instances, %d vacuous, %d violations, min margin %s (%.2fs)",
                s.lemma, s.instances_checked, s.vacuous, len(s.violations), s.min_margin,
                time.perf_counter() - started)
    if s.violations:
        logger.warning("%s: %d violation(s) found", s.lemma, len(s.violations))


def _track(s: SweepSummary, report: BoundReport) -> None:
    if s.min_margin is None or report.margin < s.min_margin:
        s.min_margin = report.margin


# ---------------------------------------------------------------------------
# Modular lemmas
# ---------------------------------------------------------------------------

def _chowla_b_masks(n: int) -> List[int]:
    """Every B with 0 in B and B \\ {0} made of units."""
    units = [b for b in range(1, n) if is_unit(b, n)]
    masks = []
    for bits in range(1 << len(units)):
        mask = 1
        for t, b in enumerate(units):
            if bits >> t & 1:
                mask |= 1 << b
        masks.append(mask)
    return masks


def _chowla_chunk(n: int, lo: int, hi: int, b_masks: List[int]) -> SweepSummary:
    s = SweepSummary(lemma="chowla")
    Bs = [ModSet(n, m) for m in b_masks]
    for a_mask in range(lo, hi):
        A = ModSet(n, a_mask)
        for B in Bs:
            report = chowla_check(A, B)
            s.instances_checked += 1
            _track(s, report)
            if not report.satisfied:
                s.violations.append(Violation(
                    instance={"n": n, "A": A.members(), "B": B.members()},
                    detail=f"|A+B| = {report.actual} < {report.bound}",
                ))
    return s


def verify_chowla(max_n: int = 10, n_jobs: int = 1, progress: bool = False) -> SweepSummary:
    """All nonempty A, B in Z/nZ for 2 <= n <= max_n."""
    if max_n < 2:
        raise InvalidModulusError(f"max_n must be >= 2, got {max_n}")
    started = time.perf_counter()
    tasks, vacuous, pairs = [], 0, 0
    for n in range(2, max_n + 1):
        b_masks = _chowla_b_masks(n)
        nonempty = (1 << n) - 1
        pairs += nonempty * nonempty
        vacuous += nonempty * (nonempty - len(b_masks))
        tasks += [(n, lo, hi, b_masks) for lo, hi in chunk_ranges(1, 1 << n, task_count(n_jobs))]
    s = _reduce("chowla", parallel_map(_chowla_chunk, tasks, n_jobs, progress, "chowla"))
    s = s.model_copy(update={"instances_checked": pairs, "vacuous": vacuous})
    _log_summary(s, started)
    return s


def _l6_chunk(n: int, lo: int, hi: int) -> SweepSummary:
    s = SweepSummary(lemma="l6")
    for mask in range(lo, hi):
        A = ModSet(n, mask)
        for alpha in range(1, n):
            s.instances_checked += 1
            stabilized = A.shift(alpha) == A
            try:
                structure = stabilizer_decompose(A, alpha)
            except AssertionError as e:
                structure, detail = None, str(e)
            else:
                detail = None
            if detail is None and stabilized != is_coset_union(A, math.gcd(n, alpha)):
                detail = f"A + {alpha} = A is {stabilized} but the coset test disagrees"
            if detail is None and (structure is not None) != stabilized:
                detail = f"decomposition returned for alpha = {alpha} disagrees with A + alpha = A"
            if detail is not None:
                s.violations.append(Violation(instance={"n": n, "A": A.members(), "alpha": alpha},
                                              detail=detail))
    return s


def verify_l6(max_n: int = 12, n_jobs: int = 1, progress: bool = False) -> SweepSummary:
    """Stabilizer equivalence for every nonempty A in Z/nZ, n <= max_n, and every alpha != 0."""
    if max_n < 2:
        raise InvalidModulusError(f"max_n must be >= 2, got {max_n}")
    started = time.perf_counter()
    tasks = [(n, lo, hi) for n in range(2, max_n + 1)
             for lo, hi in chunk_ranges(1, 1 << n, task_count(n_jobs))]
    s = _reduce("l6", parallel_map(_l6_chunk, tasks, n_jobs, progress, "l6"))
    _log_summary(s, started)
    return s


def _l8_chunk(k: int, q: int) -> SweepSummary:
    s = SweepSummary(lemma="l8")
    allowed = sorted(({q % k} | {b for b in range(1, k) if is_unit(b, k)}) - {0})
    for bits in range(1 << len(allowed)):
        B = ModSet.of(k, [0] + [allowed[t] for t in range(len(allowed)) if bits >> t & 1])
        for a_mask in range(1, 1 << k):
            A = ModSet(k, a_mask)
            s.instances_checked += 1
            try:
                report = lemma8_check(A, q, B)
            except PreconditionError:
                s.vacuous += 1
                continue
            _track(s, report)
            if not report.satisfied:
                s.violations.append(Violation(
                    instance={"k": k, "q": q, "A": A.members(), "B": B.members()},
                    detail=f"|A+B| = {report.actual} < {report.bound}",
                ))
    return s


def verify_l8(moduli: Sequence[int] = (6, 9, 10), n_jobs: int = 1, progress: bool = False) -> SweepSummary:
    """Every A, every non-unit q in [0, k) and every B in {0} ∪ ({q} ∪ units), for each composite k."""
    for k in moduli:
        fac = classify(k)
        if k <= 2 or (fac.kind == "prime_power" and fac.alpha == 1):
            raise InvalidModulusError(f"l8 sweeps need composite moduli > 2, got {k}")
    started = time.perf_counter()
    tasks = [(k, q) for k in moduli for q in range(k) if not is_unit(q, k)]
    s = _reduce("l8", parallel_map(_l8_chunk, tasks, n_jobs, progress, "l8"))
    _log_summary(s, started)
    return s


# ---------------------------------------------------------------------------
# Set bounds and lemma predicates over families of integer sets
# ---------------------------------------------------------------------------

def _check_names(names: Sequence[str]) -> None:
    for name in names:
        require_known(name)
        if name not in SET_BOUNDS and name not in LEMMA_PREDICATES:
            raise ConfigError(f"'{name}' is a modular lemma; use its own verify sweep")


def evaluate_set(names: Sequence[str], A: IntSet, k: int, out: Dict[str, SweepSummary],
                  ignore_hypotheses: bool = False) -> None:
    """Evaluate every named bound on (A, k) and fold the outcome into `out`."""
    ctx = None
    for name in names:
        s = out[name]
        if name in SET_BOUNDS:
            s.instances_checked += 1
            try:
                if name in ("graph", "full_classes"):
                    ctx = ctx or build_context(A, k)
                    report = SET_BOUNDS[name](A, k, ctx)
                else:
                    report = SET_BOUNDS[name](A, k)
            except PreconditionError:
                s.vacuous += 1
                continue
            _track(s, report)
            if not report.hypotheses_met and not ignore_hypotheses:
                s.vacuous += 1
            elif not report.satisfied:
                unmet = [h.name for h in report.hypotheses if not h.met]
                detail = f"actual {report.actual} < bound {report.bound}"
                if unmet:
                    detail += f" (hypotheses unmet: {', '.join(unmet)})"
                s.violations.append(Violation(instance={"k": k, "A": A.to_list()}, detail=detail,
                                              confirmed=confirm_with_oracle(report, A)))
            continue
        try:
            if name == "imp2":
                contexts = [build_context(A, k, p) for p in classify(k).primes]
            else:
                ctx = ctx or build_context(A, k)
                contexts = [ctx]
            reports = [r for c in contexts for r in lemma_reports(name, c, A)]
        except PreconditionError:
            s.instances_checked += 1
            s.vacuous += 1
            continue
        for r in reports:
            s.instances_checked += 1
            if r.vacuous:
                s.vacuous += 1
            elif r.violated:
                failed = [p.name for p in r.parts if p.active and not p.holds]
                s.violations.append(Violation(instance={"k": k, "A": A.to_list(), "i": r.class_index},
                                              detail=f"part(s) {', '.join(failed)} fail"))


def _exhaustive_chunk(names: Sequence[str], k: int, first: int, universe: int,
                      sizes: Optional[tuple[int, ...]], ignore_hypotheses: bool) -> Dict[str, SweepSummary]:
    out = {name: SweepSummary(lemma=name) for name in names}
    for size in sizes or range(1, universe - first + 1):
        if not 1 <= size <= universe - first:
            continue
        for combo in subsets_with_first(first, universe, size):
            evaluate_set(names, IntSet(combo), k, out, ignore_hypotheses)
    return out


def exhaustive_sweep(names: Sequence[str], ks: Sequence[int], universe: int, n_jobs: int = 1,
                     progress: bool = False, ignore_hypotheses: bool = False,
                     sizes: Optional[Sequence[int]] = None) -> Dict[str, SweepSummary]:
    """Every nonempty A in [0, universe) (of the given sizes, if any) against every named bound, for each k."""
    _check_names(names)
    if universe < 1:
        raise ConfigError(f"universe must be >= 1, got {universe}")
    for k in ks:
        if k < 2:
            raise InvalidModulusError(f"k must be >= 2, got {k}")
    started = time.perf_counter()
    size_filter = tuple(sizes) if sizes else None
    tasks = [(tuple(names), k, first, universe, size_filter, ignore_hypotheses)
             for k in ks for first in range(universe)]
    parts = parallel_map(_exhaustive_chunk, tasks, n_jobs, progress, "sets")
    out = {name: _reduce(name, [p[name] for p in parts]) for name in names}
    for s in out.values():
        _log_summary(s, started)
    return out


def _random_chunk(names: Sequence[str], k: int, sizes: Sequence[int], samples: int, universe: int,
                  seed: int, lo: int, hi: int, ignore_hypotheses: bool) -> Dict[str, SweepSummary]:
    out = {name: SweepSummary(lemma=name) for name in names}
    for counter in range(lo, hi):
        A = random_subset(seed, counter, universe, sizes[counter // samples])
        evaluate_set(names, A, k, out, ignore_hypotheses)
    return out


def random_sweep(names: Sequence[str], k: int, sizes: Sequence[int], samples: int, universe: int,
                 seed: int, n_jobs: int = 1, progress: bool = False,
                 ignore_hypotheses: bool = False) -> Dict[str, SweepSummary]:
    """`samples` seeded random sets of each size in [0, universe); set c is a function of (seed, c)."""
    _check_names(names)
    if k < 2:
        raise InvalidModulusError(f"k must be >= 2, got {k}")
    if samples < 1 or not sizes:
        raise ConfigError("random sweeps need samples >= 1 and at least one size")
    if any(n < 1 or n > universe for n in sizes):
        raise ConfigError(f"every size must lie in [1, {universe}], got {list(sizes)}")
    started = time.perf_counter()
    total = len(sizes) * samples
    tasks = [(tuple(names), k, tuple(sizes), samples, universe, seed, lo, hi, ignore_hypotheses)
             for lo, hi in chunk_ranges(0, total, task_count(n_jobs))]
    parts = parallel_map(_random_chunk, tasks, n_jobs, progress, "samples")
    out = {name: _reduce(name, [p[name] for p in parts], seed) for name in names}
    for s in out.values():
        _log_summary(s, started)
    return out


def verify_graph(universe: int = 13, ks: Sequence[int] = (3, 4, 5, 6), n_jobs: int = 1,
                 progress: bool = False) -> SweepSummary:
    return exhaustive_sweep(["graph"], ks, universe, n_jobs, progress)["graph"]


LEMMA_SWEEP = ("2full", "imp", "imp2", "da")


def verify_lemmas(universe: int, ks: Sequence[int], names: Sequence[str] = LEMMA_SWEEP, n_jobs: int = 1,
                  progress: bool = False) -> List[SweepSummary]:
    out = exhaustive_sweep(names, ks, universe, n_jobs, progress)
    return [out[name] for name in names]


def verify_thm(k: int, size: int, samples: int, universe: int, seed: int, n_jobs: int = 1,
               progress: bool = False, ignore_hypotheses: bool = False) -> SweepSummary:
    return random_sweep(["thm"], k, [size], samples, universe, seed, n_jobs, progress,
                        ignore_hypotheses)["thm"]
