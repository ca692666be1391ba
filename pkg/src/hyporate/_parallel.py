"""Thread-pool map used by the sweep helpers.

The worker count is read from ``HYPORATE_THREADS`` (default 1, i.e. serial).
The compiled kernels release the GIL, so threads give real speedups there.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("HYPORATE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, min(n, os.cpu_count() or 1))


def pmap(fn, items) -> list:
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
