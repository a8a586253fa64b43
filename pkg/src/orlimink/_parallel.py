import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Worker cap from ORLIMINK_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("ORLIMINK_THREADS", "1")))
    except ValueError:
        return 1


def chunked_map(func, n_items: int, chunk: int):
    """Apply ``func(start, stop)`` over contiguous chunks, results in order.

    numpy releases the GIL in the heavy kernels, so threads are enough.
    Output order never depends on the worker count.
    """
    bounds = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    workers = worker_count()
    if workers == 1 or len(bounds) == 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: func(*ab), bounds))
