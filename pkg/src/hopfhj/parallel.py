"""Optional process-level parallelism for grid sweeps.

Sweeps partition their work items across workers and merge results in input
order, so parallel and sequential runs produce identical output. The worker
count comes from the ``HOPFHJ_WORKERS`` environment variable (default: all
cores).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_WORKERS = "HOPFHJ_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(ENV_WORKERS, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return os.cpu_count() or 1


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map ``fn`` over ``items`` preserving order; falls back to sequential."""
    items = list(items)
    if workers is None:
        workers = worker_count()
    workers = min(workers, len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    try:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(items) // (4 * workers))
            return list(pool.map(fn, items, chunksize=chunk))
    except (OSError, RuntimeError):
        return [fn(it) for it in items]
