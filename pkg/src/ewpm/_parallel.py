"""Process-pool plumbing shared by the enumeration and determinant code.

Every parallel call site maps a top-level function over an ordered list and
merges results in list order, so output never depends on the worker count.
"""

from __future__ import annotations

import atexit
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional

_POOLS: dict = {}


def resolve_workers(threads: Optional[int]) -> int:
    """``None`` -> 1, ``0`` -> hardware default, otherwise ``threads``."""
    if threads is None:
        return 1
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, int(threads))


def _pool(workers: int) -> ProcessPoolExecutor:
    pool = _POOLS.get(workers)
    if pool is None:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=multiprocessing.get_context("fork"))
        _POOLS[workers] = pool
    return pool


@atexit.register
def shutdown_pools() -> None:
    for pool in _POOLS.values():
        pool.shutdown(cancel_futures=True)
    _POOLS.clear()


def pmap(fn: Callable, items: Iterable, workers: int = 1) -> List:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    return list(_pool(workers).map(fn, items))
