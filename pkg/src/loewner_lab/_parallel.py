"""Small thread-pool helpers.

Worker count is capped by the ``LOEWNER_LAB_THREADS`` environment variable.
The workloads parallelized here (SVDs, batched linear solves) spend their
time inside LAPACK calls that release the GIL, so threads are sufficient.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count(n_items: int | None = None) -> int:
    """Number of worker threads to use, honoring LOEWNER_LAB_THREADS."""
    env = os.environ.get("LOEWNER_LAB_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            cap = 1
        cap = max(1, cap)
    else:
        cap = min(8, os.cpu_count() or 1)
    if n_items is not None:
        cap = min(cap, max(1, n_items))
    return cap


def parallel_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T]) -> list[R]:
    """Map ``fn`` over ``items``, preserving order.

    Falls back to a plain loop when only one worker is allowed, which also
    keeps tracebacks simple under LOEWNER_LAB_THREADS=1.
    """
    items = list(items)
    n = worker_count(len(items))
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
