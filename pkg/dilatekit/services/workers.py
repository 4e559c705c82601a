# dilatekit/services/workers.py
"""Worker pool for sweeps and searches.

Tasks are independent and their results come back in submission order, so a
reduction over them does not depend on the worker count or on scheduling.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Iterable, List, Sequence

from joblib import Parallel, delayed, effective_n_jobs
from tqdm import tqdm

logger = logging.getLogger(__name__)


def parallel_map(fn: Callable[..., Any], tasks: Sequence[tuple], n_jobs: int = 1,
                 progress: bool = False, desc: str = "") -> List[Any]:
    logger.debug("%s: %d tasks, n_jobs=%s", desc or fn.__name__, len(tasks), n_jobs)
    if n_jobs == 1 or len(tasks) < 2:
        results: Iterable[Any] = (fn(*t) for t in tasks)
    else:
        results = Parallel(n_jobs=n_jobs, return_as="generator")(delayed(fn)(*t) for t in tasks)
    return list(tqdm(results, total=len(tasks), desc=desc, disable=not progress, leave=False))


def task_count(n_jobs: int, per_worker: int = 4) -> int:
    """How many tasks to cut a sweep into; n_jobs follows joblib (-1 = every core)."""
    return effective_n_jobs(n_jobs) * per_worker


def chunk_ranges(lo: int, hi: int, chunks: int) -> List[tuple[int, int]]:
    """Split [lo, hi) into at most `chunks` contiguous ranges."""
    chunks = max(1, min(chunks, hi - lo))
    step, extra = divmod(hi - lo, chunks)
    out, start = [], lo
    for c in range(chunks):
        end = start + step + (1 if c < extra else 0)
        if end > start:
            out.append((start, end))
        start = end
    return out
