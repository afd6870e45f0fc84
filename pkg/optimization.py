# Sampling utilities: seed-stable chunking and optional thread parallelism
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import wraps

import numpy as np

from performance_config import SAMPLING_CONFIG, get_thread_count

logger = logging.getLogger(__name__)


def performance_timer(func):
    """Decorator that logs how long a function took"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        logger.debug("%s took %.3fs", func.__name__, time.perf_counter() - start_time)
        return result
    return wrapper


def batch_sizes(total, batch_size):
    """Sizes of consecutive batches covering `total` items"""
    for start in range(0, total, batch_size):
        yield min(batch_size, total - start)


def seeded_batches(total, seed, batch_size=None):
    """Pair each batch size with its own generator derived from `seed`.

    Batch boundaries depend only on `total` and `batch_size`, and every batch
    gets a child of one SeedSequence, so the drawn numbers are the same no
    matter how the batches are later scheduled.
    """
    batch_size = batch_size or SAMPLING_CONFIG['chunk_size']
    sizes = list(batch_sizes(total, batch_size))
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return [(size, np.random.default_rng(child)) for size, child in zip(sizes, children)]


def parallel_map(func, items, threads=None):
    """Ordered map over items, on up to `threads` worker threads"""
    items = list(items)
    threads = threads or get_thread_count()
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))
