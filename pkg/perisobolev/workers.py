"""
Ordered parallel map for independent work items.

Results come back in input order and are reduced by the caller in that
order, so the thread count never changes an output.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar
import logging

from .settings import THREADS

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = THREADS) -> List[R]:
    """
    Apply func to every item, possibly on a thread pool.

    Args:
        func: Pure function of one item
        items: Work items
        threads: Worker count; 1 runs inline

    Returns:
        Results in input order
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Mapping {len(items)} items on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
