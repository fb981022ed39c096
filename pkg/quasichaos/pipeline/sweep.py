# quasichaos/pipeline/sweep.py

"""
Parallel Sweeps
joblib-backed evaluation of independent sweep points. Results always come
back in grid order; a point that raises becomes a PointFailure instead of
stopping the sweep.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np
from joblib import Parallel, delayed

from quasichaos.core.errors import QuasichaosError
from quasichaos.core.models import PointFailure

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _guarded(fn: Callable[[T], R], index: int, point: T) -> tuple[Optional[R], Optional[PointFailure]]:
    try:
        return fn(point), None
    except QuasichaosError as e:
        return None, PointFailure(index=index, point=repr(point), kind=e.kind, message=str(e))
    except Exception as e:
        return None, PointFailure(index=index, point=repr(point), kind="internal", message=f"{type(e).__name__}: {e}")


class SweepRunner:
    """Evaluates pure per-point functions with a fixed worker budget."""

    def __init__(self, workers: int = 1, seed: int = 0):
        if workers < 1:
            raise ValueError(f"workers must be at least 1 (got {workers})")
        self.workers = workers
        self.seed = seed

    def _parallel(self) -> Parallel:
        if self.workers == 1:
            return Parallel(n_jobs=1, backend="sequential")
        return Parallel(n_jobs=self.workers)

    def map(self, fn: Callable[[T], R], points: Iterable[T]) -> list[R]:
        """Ordered results; the first exception propagates."""
        return self._parallel()(delayed(fn)(p) for p in points)

    def sweep(
        self, fn: Callable[[T], R], points: Sequence[T]
    ) -> tuple[list[Optional[R]], list[PointFailure]]:
        """
        Evaluate every point, isolating failures.

        Args:
            fn: Pure function of one point
            points: Nonempty grid

        Returns:
            (results, failures) with results[i] None for failed points

        Raises:
            ValueError: If the grid is empty
        """
        if len(points) == 0:
            raise ValueError("sweep grid is empty")
        logger.info(f"Sweeping {len(points)} points on {self.workers} worker(s)")
        outcomes = self._parallel()(delayed(_guarded)(fn, i, p) for i, p in enumerate(points))
        results = [value for value, _ in outcomes]
        failures = [failure for _, failure in outcomes if failure is not None]
        for failure in failures:
            logger.warning(f"Point {failure.index} failed ({failure.kind}): {failure.message}")
        return results, failures

    def rngs(self, count: int) -> list[np.random.Generator]:
        """Independent generators per point, fixed by the seed alone."""
        children = np.random.SeedSequence(self.seed).spawn(count)
        return [np.random.default_rng(child) for child in children]


def successes(results: Sequence[Optional[Any]]) -> list[int]:
    return [i for i, value in enumerate(results) if value is not None]
