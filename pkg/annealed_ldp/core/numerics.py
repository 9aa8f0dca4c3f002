"""
Small numerical helpers shared by the solvers.
"""

import logging
import math
from collections.abc import Callable
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np
from scipy.optimize import brentq

from annealed_ldp.core.conf import worker_count
from annealed_ldp.core.exceptions import SolverError

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)

# Largest dual variable the Legendre solvers will try before giving up.
DUAL_LIMIT = 700.0

T = TypeVar("T")
R = TypeVar("R")


def log_cosh(u):
    """Overflow-safe log(cosh(u)) for scalars and arrays."""
    a = np.abs(u)
    return a + np.log1p(np.exp(-2.0 * a)) - LOG2


def expand_bracket(
    func: Callable[[float], float],
    target: float,
    *,
    start: float = 1.0,
    limit: float = DUAL_LIMIT,
    center: float = 0.0,
) -> tuple[float, float] | None:
    """
    Find ``(lo, hi)`` with ``func(lo) <= target <= func(hi)`` for a
    nondecreasing ``func``, doubling a symmetric window around ``center``.

    Returns None when the window reaches ``limit`` without straddling
    the target.
    """
    width = start
    while True:
        lo, hi = center - width, center + width
        if func(lo) <= target <= func(hi):
            return lo, hi
        if width >= limit:
            logger.debug(f"Bracket for target {target:.6g} not found within +/-{limit}")
            return None
        width = min(2.0 * width, limit)


def monotone_root(
    func: Callable[[float], float],
    target: float,
    bracket: tuple[float, float],
    *,
    xtol: float = 1e-15,
) -> float:
    """Solve ``func(x) = target`` on a bracket known to straddle the target."""
    lo, hi = bracket
    try:
        return brentq(lambda x: func(x) - target, lo, hi, xtol=xtol, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        msg = "Monotone root solve failed"
        raise SolverError(
            msg,
            {"target": target, "bracket": bracket, "reason": str(exc)},
        ) from exc


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: int | None = None,
) -> list[R]:
    """
    Apply ``func`` to every item, preserving input order.

    Uses a thread pool when more than one worker is configured.
    """
    items = list(items)
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
