"""Order-preserving process pool map used for per-cluster and per-restart work."""

import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def ordered_map(fn, items, num_processors=1, chunksize=None):
    """
    Apply fn to every item, returning results in input order.

    Args:
        fn: Picklable top-level callable
        items: Iterable of picklable arguments
        num_processors: Worker processes (<= 1 runs in-process)
        chunksize: Items per task (default: spread over ~4 tasks per worker)

    Returns:
        list of results
    """
    items = list(items)
    if num_processors is None or num_processors <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    workers = min(num_processors, len(items))
    if chunksize is None:
        chunksize = max(1, len(items) // (workers * 4))
    logger.debug(f"Dispatching {len(items)} work items to {workers} processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items, chunksize=chunksize))
