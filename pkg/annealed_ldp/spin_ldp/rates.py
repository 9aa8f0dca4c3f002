"""
Annealed spin large deviations.

The joint rate of (S_n / n, S_n^(w) / n) is

    I_an(x1, x2) = I(x1, x2) - sinh(beta) x2^2 / (2 E[W]) - B x1 - log 2 - alpha + psi_an,

and every other spin rate here is either an equivalent form of it, a
contraction of it, or a Legendre transform of the pressure.
"""

import logging
import math
from enum import StrEnum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.optimize import minimize_scalar

from annealed_ldp.core.numerics import LOG2
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.legendre.entropy import RateEval
from annealed_ldp.legendre.entropy import entropy_rate
from annealed_ldp.legendre.entropy import entropy_rate_tilted
from annealed_ldp.legendre.entropy import solve_first_dual
from annealed_ldp.legendre.entropy import weighted_entropy_rate
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import alpha
from annealed_ldp.thermo.services import annealed_pressure
from annealed_ldp.thermo.services import critical_beta
from annealed_ldp.thermo.services import magnetization
from annealed_ldp.thermo.services import spontaneous_magnetization

logger = logging.getLogger(__name__)

# Negative values above this are rounding noise and are clipped silently.
NEGATIVE_RATE_TOLERANCE = 1e-9
SEARCH_PIECES = 4
SEARCH_XATOL = 1e-10


class PressureForm(StrEnum):
    """Both forms take the sup over (x1, x2); they differ in which joint rate is subtracted."""

    TWO_DIM = "two_dim"
    TWO_DIM_B = "two_dim_B"


def _coupling_ratio(point: ModelPoint) -> float:
    return point.theta / point.model.mean


def _offset(point: ModelPoint) -> float:
    """psi_an - alpha - log 2, the constant shared by every joint-rate form."""
    return annealed_pressure(point) - alpha(point.beta, point.model) - LOG2


def _clip(value: float, where: tuple[float, float]) -> float:
    if value >= 0.0:
        return value
    if value < -NEGATIVE_RATE_TOLERANCE:
        logger.warning(f"Clipped negative rate {value:.3e} at {where}")
    return 0.0


def _with_value(base: RateEval, value: float) -> RateEval:
    return RateEval(
        value=_clip(value, base.location),
        duals=base.duals,
        location=base.location,
        residuals=base.residuals,
    )


def joint_rate(x1: float, x2: float, point: ModelPoint) -> RateEval:
    """
    Joint annealed rate of the spin and weighted-spin averages.

    Args:
        x1: Spin average S_n / n
        x2: Weighted spin average S_n^(w) / n
        point: Model parameters

    Returns:
        RateEval carrying the duals of the entropy rate I
    """
    base = entropy_rate(x1, x2, point.model)
    if not base.finite:
        return base
    value = base.value - 0.5 * _coupling_ratio(point) * x2 * x2 - point.B * x1 + _offset(point)
    return _with_value(base, value)


def joint_rate_alt(x1: float, x2: float, point: ModelPoint) -> RateEval:
    """The same rate written through the field-shifted entropy I^(B)."""
    base = entropy_rate_tilted(x1, x2, point.B, point.model)
    if not base.finite:
        return base
    value = base.value - 0.5 * _coupling_ratio(point) * x2 * x2 - float(log_cosh(point.B)) + _offset(point)
    return _with_value(base, value)


def _optimal_weighted_average(point: ModelPoint) -> float:
    """Maximizer of theta x^2 / (2 E[W]) - I^w(x; B), polished on its fixed-point equation."""
    model = point.model
    ratio = _coupling_ratio(point)
    atoms, probs = model.support

    def negative_objective(x):
        return weighted_entropy_rate(x, point.B, model).value - 0.5 * ratio * x * x

    edge = model.mean * (1.0 - 1e-9)
    candidates = [0.0]
    for bounds in ((-edge, 0.0), (0.0, edge)):
        result = minimize_scalar(negative_objective, bounds=bounds, method="bounded", options={"xatol": 1e-12})
        candidates.append(float(result.x))
    x = min(candidates, key=negative_objective)

    # Stationarity: x = E[W tanh(B + ratio W x)].
    for _ in range(3):
        th = np.tanh(point.B + ratio * atoms * x)
        residual = float(probs @ (atoms * th)) - x
        slope = ratio * float(probs @ (atoms * atoms * (1.0 - th * th))) - 1.0
        if slope == 0.0:
            break
        candidate = x - residual / slope
        if abs(candidate) >= model.mean or negative_objective(candidate) > negative_objective(x):
            break
        x = candidate
    return x


def pressure_variational(point: ModelPoint, form: str = PressureForm.TWO_DIM) -> float:
    """
    Annealed pressure as a supremum over the joint averages.

    The two-dimensional supremum is reduced to the weighted coordinate: the
    optimal x1 for given x2 is E[tanh(B + W t)] with t the weighted dual.
    The bracketed expression is then evaluated at the reduced optimum.
    """
    model = point.model
    x2 = _optimal_weighted_average(point)
    weighted = weighted_entropy_rate(x2, point.B, model)
    x1 = weighted.location[0]
    quadratic = 0.5 * _coupling_ratio(point) * x2 * x2
    constant = LOG2 + alpha(point.beta, model)

    if form == PressureForm.TWO_DIM:
        inner = point.B * x1 - entropy_rate(x1, x2, model).value
    elif form == PressureForm.TWO_DIM_B:
        inner = float(log_cosh(point.B)) - entropy_rate_tilted(x1, x2, point.B, model).value
    else:
        msg = f"Unknown pressure form {form!r}"
        raise ValueError(msg)
    return quadratic + inner + constant


def spin_rate(m: float, point: ModelPoint) -> RateEval:
    """
    Contraction of the joint rate onto the spin average.

    The infimum over x2 is searched through the weighted dual t2: at the
    minimizer t2 = sinh(beta) x2 / E[W], so |t2| < sinh(beta), and each t2
    fixes t1 and x2 through the constraint E[tanh(t1 + W t2)] = m.
    """
    if abs(m) >= 1.0:
        return RateEval.infinite((m, math.nan))
    model = point.model
    atoms, probs = model.support
    ratio = _coupling_ratio(point)
    offset = _offset(point)

    @lru_cache(maxsize=None)
    def evaluate(t2):
        t1 = solve_first_dual(m, t2, model)
        args = t1 + atoms * t2
        x2 = float(probs @ (atoms * np.tanh(args)))
        entropy = t1 * m + t2 * x2 - float(probs @ log_cosh(args))
        value = entropy - 0.5 * ratio * x2 * x2 - point.B * m + offset
        return value, t1, x2

    def objective(t2):
        return evaluate(t2)[0]

    width = point.theta
    candidates = [0.0]
    if width > 0.0 and not model.is_single_type:
        edges = np.linspace(-width, width, SEARCH_PIECES + 1)
        candidates.extend(float(e) for e in edges)
        for lo, hi in zip(edges[:-1], edges[1:], strict=True):
            result = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": SEARCH_XATOL})
            candidates.append(float(result.x))
    t2 = min(candidates, key=objective)
    value, t1, x2 = evaluate(t2)
    return RateEval(value=_clip(value, (m, x2)), duals=(t1, t2), location=(m, x2))


def weighted_spin_rate(x2: float, point: ModelPoint) -> RateEval:
    """
    Contraction of the joint rate onto the weighted spin average.

    The inner infimum over x1 is attained where the first dual equals B,
    which the one-dimensional weighted transform supplies directly.
    """
    weighted = weighted_entropy_rate(x2, point.B, point.model)
    if not weighted.finite:
        return weighted
    return joint_rate(weighted.location[0], x2, point)


def spin_rate_highT(m: float, point: ModelPoint) -> RateEval:
    """
    Legendre transform of the pressure in the field.

        sup_t m t - psi_an(beta, B + t) + psi_an(beta, B)

    Solved through m = M_an(beta, B + t). Above the critical temperature a
    spin average strictly inside (-m+, m+) is not exposed: the transform
    has a flat piece there and the result carries ``non_exposed=True``.
    """
    if abs(m) >= 1.0:
        return RateEval.infinite((m, math.nan))
    model = point.model
    psi_here = annealed_pressure(point)

    if point.beta > critical_beta(model):
        m_plus = spontaneous_magnetization(point.beta, model)
        if abs(m) < m_plus:
            value = -point.B * m - annealed_pressure(point.with_field(0.0)) + psi_here
            logger.warning(f"Spin average {m!r} lies on the flat piece (-{m_plus:.6g}, {m_plus:.6g})")
            return RateEval(
                value=_clip(value, (m, math.nan)),
                duals=(-point.B, math.nan),
                location=(m, math.nan),
                non_exposed=True,
            )

    if m == 0.0:
        field = 0.0
    else:
        # M(h) >= tanh(h) for h > 0 bounds the field from above.
        sign = math.copysign(1.0, m)

        def excess(h):
            return magnetization(point.with_field(h)) - abs(m)

        field = sign * brentq(excess, 0.0, math.atanh(abs(m)), xtol=1e-15, maxiter=500)
    t = field - point.B
    value = m * t - annealed_pressure(point.with_field(field)) + psi_here
    return RateEval(value=_clip(value, (m, math.nan)), duals=(t, math.nan), location=(m, math.nan))
