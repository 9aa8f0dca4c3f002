import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

from annealed_ldp.core.numerics import parallel_map
from annealed_ldp.legendre.entropy import RateEval
from annealed_ldp.spin_ldp.combinatorial import combinatorial_spin_rate
from annealed_ldp.spin_ldp.rates import spin_rate
from annealed_ldp.spin_ldp.rates import spin_rate_highT
from annealed_ldp.thermo.services import ModelPoint

logger = logging.getLogger(__name__)


class RateMethod(StrEnum):
    CONTRACTION = "contraction"
    HIGHT_LEGENDRE = "highT_legendre"
    COMBINATORIAL = "combinatorial"


@dataclass(frozen=True)
class SpinRateCurve:
    """
    A spin rate sampled on an m-grid.

    ``minimizers`` holds the optimal weighted average x2 per grid point
    (NaN for the Legendre method, which has none).
    """

    grid: tuple[float, ...]
    values: tuple[float, ...]
    minimizers: tuple[float, ...]
    method: str
    non_exposed: tuple[bool, ...] = ()


def _evaluate(method: str, m: float, point: ModelPoint) -> RateEval:
    if method == RateMethod.CONTRACTION:
        return spin_rate(m, point)
    if method == RateMethod.HIGHT_LEGENDRE:
        return spin_rate_highT(m, point)
    if method == RateMethod.COMBINATORIAL:
        return combinatorial_spin_rate(m, point)
    msg = f"Unknown rate method {method!r}; choose from {', '.join(RateMethod)}"
    raise ValueError(msg)


def _weighted_minimizer(method: str, result: RateEval, point: ModelPoint) -> float:
    x = result.location[1]
    if method == RateMethod.COMBINATORIAL and math.isfinite(x):
        # Up-weight x maps to the weighted spin average 2x - E[W].
        return 2.0 * x - point.model.mean
    return x


def spin_rate_curve(grid: Sequence[float], point: ModelPoint, method: str = RateMethod.CONTRACTION) -> SpinRateCurve:
    """
    Evaluate one spin rate method over a grid of spin averages.

    Grid points are independent and run on the configured worker pool;
    the curve keeps grid order.
    """
    grid = tuple(float(m) for m in grid)
    logger.info(f"Evaluating {method} spin rate on {len(grid)} points at beta={point.beta!r}, B={point.B!r}")
    results = parallel_map(lambda m: _evaluate(method, m, point), grid)
    return SpinRateCurve(
        grid=grid,
        values=tuple(r.value for r in results),
        minimizers=tuple(_weighted_minimizer(method, r, point) for r in results),
        method=str(method),
        non_exposed=tuple(r.non_exposed for r in results),
    )
