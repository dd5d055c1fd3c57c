#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import psutil

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "CTRLEQ_THREADS"


def default_workers() -> int:
    """
    `CTRLEQ_THREADS` when set, otherwise the number of physical cores (psutil
    can not always tell, then we fall back to the logical count).
    """
    configured = os.environ.get(THREADS_ENV)
    if configured:
        try:
            value = int(configured)
        except ValueError:
            logger.warning("ignoring %s=%r, not an integer", THREADS_ENV, configured)
        else:
            if value > 0:
                return value
            logger.warning("ignoring %s=%r, must be positive", THREADS_ENV, configured)
    return psutil.cpu_count(logical=False) or os.cpu_count() or 1


def peak_rss_mb() -> float:
    """resident memory of the current process, in MiB."""
    return psutil.Process().memory_info().rss / (1024 * 1024)


def _init_worker(level: int) -> None:
    # spawned workers do not inherit the parent's handlers
    if not logging.getLogger().handlers:
        logging.basicConfig(level=level)
    logging.getLogger().setLevel(level)


class ReportPoolExecutor(ProcessPoolExecutor):
    """
    Same as concurrent.futures.ProcessPoolExecutor, but sized from
    `default_workers()` and with workers logging at the parent's level.
    """

    def __init__(self, max_workers: Optional[int] = None, **kwargs) -> None:
        cap = default_workers()
        self.workers = min(max_workers, cap) if max_workers else cap
        super().__init__(
            **{
                **kwargs,
                "max_workers": self.workers,
                "initializer": _init_worker,
                "initargs": (logging.getLogger().getEffectiveLevel(),),
            }
        )


def map_ordered(
    fnc: Callable[[T], R],
    items: Sequence[T],
    max_workers: Optional[int] = None,
) -> List[R]:
    """
    fnc over items, results in input order. With one worker (or one item) we
    stay in this process.

    Options:
        max_workers: further caps the pool, `CTRLEQ_THREADS` still applies.
    """
    workers = min(max_workers or default_workers(), default_workers(), len(items))
    if workers <= 1:
        return [fnc(item) for item in items]

    logger.info("pool: workers=%d items=%d", workers, len(items))
    with ReportPoolExecutor(max_workers=workers) as pool:
        futures: List[Any] = [pool.submit(fnc, item) for item in items]
        return [future.result() for future in futures]
