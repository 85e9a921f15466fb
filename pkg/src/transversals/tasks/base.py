"""Base task for sharded enumerations with lifecycle logging."""

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

import structlog

from transversals.config import get_settings

logger = structlog.get_logger()

T = TypeVar("T")
R = TypeVar("R")


class ShardedTask:
    """Run a function over independent work items, inline or on a process pool.

    Results always come back in input order, so callers that reduce with
    "first in canonical order" get the same answer for any number of jobs.
    """

    def __init__(self, name: str, jobs: int | None = None):
        self.name = name
        self.jobs = get_settings().jobs if jobs is None else jobs

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply fn to every item."""
        work = list(items)
        try:
            if self.jobs <= 1 or len(work) <= 1:
                results = [fn(item) for item in work]
            else:
                with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                    results = list(pool.map(fn, work, chunksize=self._chunksize(len(work))))
        except Exception as exc:
            self.on_failure(exc, len(work))
            raise
        self.on_success(len(work))
        return results

    def first(self, fn: Callable[[T], R | None], items: Iterable[T]) -> R | None:
        """First non-None result in input order; stops early when running inline."""
        work = list(items)
        result: R | None = None
        try:
            if self.jobs <= 1 or len(work) <= 1:
                result = next((r for r in map(fn, work) if r is not None), None)
            else:
                pool = ProcessPoolExecutor(max_workers=self.jobs)
                try:
                    ordered = pool.map(fn, work, chunksize=self._chunksize(len(work)))
                    result = next((r for r in ordered if r is not None), None)
                finally:
                    pool.shutdown(wait=True, cancel_futures=True)
        except Exception as exc:
            self.on_failure(exc, len(work))
            raise
        self.on_success(len(work))
        return result

    def _chunksize(self, size: int) -> int:
        return max(1, size // (self.jobs * 4))

    def on_failure(self, exc: Exception, items: int) -> None:
        """Log task failure."""
        logger.error(
            "Task failed",
            task_name=self.name,
            error=str(exc),
            error_type=type(exc).__name__,
            items=items,
        )

    def on_success(self, items: int) -> None:
        """Log task success."""
        logger.debug("Task completed", task_name=self.name, items=items, jobs=self.jobs)
