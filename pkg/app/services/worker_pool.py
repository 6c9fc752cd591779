"""
Process pool over independent cities.

Results come back in input order whatever the number of workers, so reductions done by
the caller are identical for serial and parallel runs.
"""
import logging
import multiprocessing as mp
import os
from typing import Callable, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    return os.cpu_count() or 1


def map_ordered(function: Callable[[T], R], items: Sequence[T], workers: int = 1,
                chunksize: int = 4) -> list[R]:
    """
    Apply a picklable function to every item, in parallel when workers > 1.

    Args:
        function: Module-level function or functools.partial of one
        items: Work units (one per city)
        workers: Process count; 1 runs in-process
        chunksize: Items handed to a worker at once

    Returns:
        Results in the order of items
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if workers == 1 or len(items) <= 1:
        return [function(item) for item in items]

    processes = min(workers, len(items))
    logger.debug("Mapping %d items over %d processes", len(items), processes)
    with mp.Pool(processes=processes) as pool:
        return pool.map(function, items, chunksize=chunksize)
