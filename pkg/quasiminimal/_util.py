"""
Module for internal utility functions.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable
    from typing import Any, TypeVar

    AnyT = TypeVar("AnyT", bound=Any)
    ItemT = TypeVar("ItemT")
    ResultT = TypeVar("ResultT")

logger = logging.getLogger(__name__)

# environment fallback for the number of worker processes
THREADS_ENV = "QML_THREADS"


def writer(func: Any) -> Callable[[AnyT], AnyT]:
    """
    Decorator for writer functions.
    """

    def decorator(writer: AnyT) -> AnyT:
        func.write = writer
        writer.__module__ = func.__module__
        writer.__name__ = "write"
        writer.__qualname__ = f"{func.__qualname__}.write"
        return writer

    return decorator


def resolve_workers(workers: int | None = None) -> int:
    """
    Return the number of workers: explicit value, then the environment
    variable ``QML_THREADS``, then 1.
    """
    if workers is None:
        value = os.environ.get(THREADS_ENV)
        if value is None or value.strip() == "":
            return 1
        try:
            workers = int(value)
        except ValueError:
            msg = f"{THREADS_ENV} must be an integer, got {value!r}"
            raise ValueError(msg) from None
    if workers < 1:
        msg = f"number of workers must be positive, got {workers}"
        raise ValueError(msg)
    return workers


def parallel_map(
    func: Callable[[ItemT], ResultT],
    items: Iterable[ItemT],
    workers: int = 1,
) -> list[ResultT]:
    """
    Apply *func* to every item, in worker processes if *workers* > 1.

    Results are returned in input order in both cases.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug("mapping %d items over %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))
