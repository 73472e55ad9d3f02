"""Order-preserving worker-pool map for embarrassingly parallel k-point loops.

Threads suffice here: the work inside each task is a LAPACK call that
releases the GIL.  Results come back in input order, so downstream
reductions stay deterministic.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    if threads is None or threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
