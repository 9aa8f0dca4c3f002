"""
Base entropy rate functions of the spin and weighted-spin averages.

    I^(B)(x1, x2) = sup_{t1, t2} t1 x1 + t2 x2 - E[log cosh(B + t1 + W t2)] + log cosh B

with I = I^(0). The supremum is attained at the unique solution of

    x1 = E[tanh(B + t1 + W t2)],    x2 = E[W tanh(B + t1 + W t2)],

found by a nested monotone solve: t1 for the first equation at fixed t2,
then t2 along that constraint, then a 2x2 Newton polish.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import SolverError
from annealed_ldp.core.numerics import DUAL_LIMIT
from annealed_ldp.core.numerics import expand_bracket
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.core.numerics import monotone_root
from annealed_ldp.weights.distributions import WeightModel

logger = logging.getLogger(__name__)

STATIONARITY_TOLERANCE = 1e-10
NEWTON_STEPS = 2
SINGLE_TYPE_TOLERANCE = 1e-12

NAN_PAIR = (math.nan, math.nan)


@dataclass(frozen=True)
class RateEval:
    """
    A rate-function value with its optimizer.

    ``duals`` holds (t1, t2) or (lambda1, lambda2) depending on the solver;
    ``location`` is the (x1, x2) point the value refers to. Unattainable
    arguments give ``value=inf`` and ``finite=False``.
    """

    value: float
    duals: tuple[float, float] = NAN_PAIR
    location: tuple[float, float] = NAN_PAIR
    finite: bool = True
    residuals: tuple[float, float] = (0.0, 0.0)
    non_exposed: bool = False

    @classmethod
    def infinite(cls, location: tuple[float, float] = NAN_PAIR) -> "RateEval":
        return cls(value=math.inf, location=location, finite=False)


@dataclass(frozen=True)
class Domain2D:
    """Open box |x1| < 1, |x2| < E[W] outside which every rate is +inf."""

    model: WeightModel

    @property
    def x1_range(self) -> tuple[float, float]:
        return -1.0, 1.0

    @property
    def x2_range(self) -> tuple[float, float]:
        return -self.model.mean, self.model.mean

    def contains(self, x1: float, x2: float) -> bool:
        return abs(x1) < 1.0 and abs(x2) < self.model.mean


def _moments(s: float, t2: float, model: WeightModel) -> tuple[float, float]:
    atoms, probs = model.support
    th = np.tanh(s + atoms * t2)
    return float(probs @ th), float(probs @ (atoms * th))


def solve_first_dual(x1: float, t2: float, model: WeightModel, B: float = 0.0) -> float:
    """
    t1 with E[tanh(B + t1 + W t2)] = x1 for fixed t2.

    The shifted argument s = B + t1 lies within a_K |t2| of atanh(x1),
    which gives the bracket directly.
    """
    if abs(x1) >= 1.0:
        msg = f"Spin average must lie in (-1, 1), got {x1!r}"
        raise DomainError(msg)
    atoms, probs = model.support
    center = math.atanh(x1)
    spread = atoms[-1] * abs(t2) + 1.0

    def first(s):
        return float(probs @ np.tanh(s + atoms * t2)) - x1

    s = brentq(first, center - spread, center + spread, xtol=1e-15, maxiter=500)
    return s - B


def achievable_weighted_interval(x1: float, model: WeightModel) -> tuple[float, float]:
    """
    Range of x2 = E[W sigma] compatible with E[sigma] = x1.

    Up-spins fill the smallest atoms first for the lower end and the largest
    atoms first for the upper end. Interior points are attained with finite
    duals; for a single atom the range collapses to a point.
    """
    if abs(x1) > 1.0:
        msg = f"Spin average must lie in [-1, 1], got {x1!r}"
        raise DomainError(msg)
    atoms, probs = model.support
    up = 0.5 * (1.0 + x1)

    def filled(order):
        remaining, mass = up, 0.0
        for a, p in zip(atoms[order], probs[order], strict=True):
            take = min(p, remaining)
            mass += take * a
            remaining -= take
            if remaining <= 0.0:
                break
        return 2.0 * mass - model.mean

    return filled(slice(None)), filled(slice(None, None, -1))


def _newton_polish(x1, x2, s, t2, model):
    atoms, probs = model.support
    for _ in range(NEWTON_STEPS):
        th = np.tanh(s + atoms * t2)
        sech2 = 1.0 - th * th
        r = np.array([x1 - probs @ th, x2 - probs @ (atoms * th)])
        jac = np.array(
            [
                [probs @ sech2, probs @ (atoms * sech2)],
                [probs @ (atoms * sech2), probs @ (atoms * atoms * sech2)],
            ],
        )
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        candidate = (s + step[0], t2 + step[1])
        m1, m2 = _moments(*candidate, model)
        if abs(m1 - x1) + abs(m2 - x2) > abs(r[0]) + abs(r[1]):
            break
        s, t2 = candidate
    return s, t2


def _finish(x1, x2, B, s, t2, model) -> RateEval:
    atoms, probs = model.support
    m1, m2 = _moments(s, t2, model)
    residuals = (abs(m1 - x1), abs(m2 - x2))
    if max(residuals) > STATIONARITY_TOLERANCE:
        msg = "Stationarity residual above tolerance"
        raise SolverError(msg, {"x": (x1, x2), "B": B, "duals": (s - B, t2), "residuals": residuals})
    t1 = s - B
    value = t1 * x1 + t2 * x2 - float(probs @ log_cosh(s + atoms * t2)) + float(log_cosh(B))
    return RateEval(
        value=value,
        duals=(t1, t2),
        location=(x1, x2),
        residuals=residuals,
    )


def entropy_rate_tilted(x1: float, x2: float, B: float, model: WeightModel) -> RateEval:
    """
    I^(B)(x1, x2) via its stationarity system.

    Args:
        x1: Spin average
        x2: Weighted spin average
        B: Field shifting the log-cosh
        model: Weight law

    Returns:
        RateEval with duals (t1, t2); infinite outside the open domain or
        when x2 is not attainable given x1
    """
    location = (x1, x2)
    if not Domain2D(model).contains(x1, x2):
        return RateEval.infinite(location)

    if model.is_single_type:
        a = model.min_atom
        if abs(x2 - a * x1) > SINGLE_TYPE_TOLERANCE * max(1.0, a):
            return RateEval.infinite(location)
        return _finish(x1, a * x1, B, math.atanh(x1), 0.0, model)

    def constrained_x2(t2):
        s = solve_first_dual(x1, t2, model)
        return _moments(s, t2, model)[1]

    bracket = expand_bracket(constrained_x2, x2, limit=DUAL_LIMIT)
    if bracket is None:
        logger.warning(f"Moment pair ({x1!r}, {x2!r}) is not attainable; rate is infinite")
        return RateEval.infinite(location)

    t2 = monotone_root(constrained_x2, x2, bracket)
    s = solve_first_dual(x1, t2, model)
    s, t2 = _newton_polish(x1, x2, s, t2, model)
    return _finish(x1, x2, B, s, t2, model)


def entropy_rate(x1: float, x2: float, model: WeightModel) -> RateEval:
    """I(x1, x2) = sup t1 x1 + t2 x2 - E[log cosh(t1 + W t2)]."""
    return entropy_rate_tilted(x1, x2, 0.0, model)


def weighted_entropy_rate(x: float, B: float, model: WeightModel) -> RateEval:
    """
    One-dimensional transform sup_t t x - E[log cosh(B + W t)] + log cosh B.

    This is I^(B) with t1 pinned to 0. ``location`` carries the minimizing
    spin average E[tanh(B + W t*)] next to x, and ``duals`` is (0, t*).
    """
    if abs(x) >= model.mean:
        return RateEval.infinite((math.nan, x))
    atoms, probs = model.support

    def slope(t):
        return float(probs @ (atoms * np.tanh(B + atoms * t)))

    bracket = expand_bracket(slope, x, limit=DUAL_LIMIT)
    if bracket is None:
        logger.warning(f"Weighted average {x!r} is not attainable; rate is infinite")
        return RateEval.infinite((math.nan, x))
    t = monotone_root(slope, x, bracket)

    for _ in range(NEWTON_STEPS):
        th = np.tanh(B + atoms * t)
        curvature = float(probs @ (atoms * atoms * (1.0 - th * th)))
        if curvature <= 0.0:
            break
        candidate = t + (x - float(probs @ (atoms * th))) / curvature
        if abs(slope(candidate) - x) > abs(slope(t) - x):
            break
        t = candidate

    residual = abs(slope(t) - x)
    if residual > STATIONARITY_TOLERANCE:
        msg = "Weighted stationarity residual above tolerance"
        raise SolverError(msg, {"x": x, "B": B, "t": t, "residual": residual})
    x1 = float(probs @ np.tanh(B + atoms * t))
    value = t * x - float(probs @ log_cosh(B + atoms * t)) + float(log_cosh(B))
    return RateEval(
        value=value,
        duals=(0.0, t),
        location=(x1, x),
        residuals=(0.0, residual),
    )
