"""Optional thread parallelism for the big pairwise scans.

THICKKNOT_THREADS caps the worker count (default 1 = sequential).  Blocked
min/max reductions are merged in a fixed order, so threaded results are
bit-identical to sequential ones.
"""

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_count", "blocked_map"]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("THICKKNOT_THREADS", "1")))
    except ValueError:
        return 1


def blocked_map(func, blocks):
    """Apply ``func`` to each block, preserving block order in the result."""
    workers = worker_count()
    if workers <= 1 or len(blocks) <= 1:
        return [func(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, blocks))
