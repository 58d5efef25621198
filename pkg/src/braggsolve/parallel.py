"""Deterministic data-parallel helper.

Work is partitioned into contiguous index chunks that write to disjoint
slices of preallocated output arrays, so results are bit-identical for
any worker count. Threads suffice because the heavy kernels (BLAS,
sparse solves, FFTs) release the GIL.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_chunks(work, n_items: int, workers: int):
    """Call work(lo, hi) over a contiguous partition of range(n_items)."""
    if n_items <= 0:
        return
    workers = max(1, min(int(workers), n_items))
    if workers == 1:
        work(0, n_items)
        return
    bounds = [n_items * i // workers for i in range(workers + 1)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(work, lo, hi)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()
