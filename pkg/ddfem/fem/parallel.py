"""Deterministic chunked evaluation over a thread pool."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

MIN_CHUNK = 2048


def default_threads() -> int:
    """Thread count from DDFEM_THREADS, 1 when unset or invalid."""
    value = os.getenv("DDFEM_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning("Ignoring invalid DDFEM_THREADS=%r, using 1 thread", value)
        return 1


def chunk_bounds(n_items: int, threads: int, min_chunk: int = MIN_CHUNK) -> list[tuple[int, int]]:
    n_chunks = max(1, min(threads, -(-n_items // min_chunk)))
    edges = np.linspace(0, n_items, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a] or [(0, 0)]


def chunked_map(
    fn: Callable[[int, int], tuple | np.ndarray],
    n_items: int,
    threads: int | None = None,
    min_chunk: int = MIN_CHUNK,
):
    """
    Evaluate fn(start, stop) on contiguous chunks and concatenate in order.

    fn returns an array or a tuple of arrays; results are concatenated
    along axis 0 in chunk order, so the output does not depend on the
    number of threads.

    Args:
        fn: Chunk evaluator.
        n_items: Length of the index range.
        threads: Worker threads (DDFEM_THREADS when None).
        min_chunk: Smallest chunk worth a thread.
    """
    threads = default_threads() if threads is None else max(1, int(threads))
    bounds = chunk_bounds(n_items, threads, min_chunk)
    if len(bounds) == 1:
        results = [fn(*bounds[0])]
    else:
        logger.debug("chunked_map: %d chunks on %d threads", len(bounds), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda b: fn(*b), bounds))
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(parts, axis=0) for parts in zip(*results))
    return np.concatenate(results, axis=0)
