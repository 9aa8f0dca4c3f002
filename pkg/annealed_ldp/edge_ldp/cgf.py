"""
Large deviations of the edge count |E_n| under the annealed measure.

Tilting every edge by e^t multiplies the Curie-Weiss coupling by e^t, so
the limiting cumulant generating function of |E_n| / n is a difference of
two Curie-Weiss pressures plus the tilted edge mass.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from annealed_ldp.core.numerics import expand_bracket
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.core.numerics import monotone_root
from annealed_ldp.fixedpoint.solver import solve_z_star
from annealed_ldp.legendre.entropy import RateEval
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import icw_pressure_from

logger = logging.getLogger(__name__)

TILT_LIMIT = 50.0


@dataclass(frozen=True)
class EdgeCgfEval:
    t: float
    value: float
    derivative: float
    z_star_t: float


def _edge_mass(t: float, point: ModelPoint) -> float:
    """(e^t - 1) cosh(beta) E[W] / 2."""
    return 0.5 * math.expm1(t) * math.cosh(point.beta) * point.model.mean


def edge_cgf(t: float, point: ModelPoint) -> EdgeCgfEval:
    """
    phi(t) = psi_ICW(e^t sinh beta, B) - psi_ICW(sinh beta, B) + (e^t - 1) cosh(beta) E[W] / 2.

    Args:
        t: Edge tilt
        point: Model parameters

    Returns:
        EdgeCgfEval with phi(t), phi'(t) and the tilted fixed point
    """
    model = point.model
    tilted = solve_z_star(math.exp(t) * point.theta, point.B, model)
    untilted = solve_z_star(point.theta, point.B, model)
    value = icw_pressure_from(tilted, model) - icw_pressure_from(untilted, model) + _edge_mass(t, point)
    derivative = 0.5 * tilted.z_star**2 + 0.5 * math.exp(t) * math.cosh(point.beta) * model.mean
    return EdgeCgfEval(t=t, value=value, derivative=derivative, z_star_t=tilted.z_star)


def edge_cgf_expanded(t: float, point: ModelPoint) -> float:
    """The edge CGF written out term by term, without the pressure shortcut."""
    model = point.model
    atoms, probs = model.support
    theta_t = math.exp(t) * point.theta
    z_t = solve_z_star(theta_t, point.B, model).z_star
    z_0 = solve_z_star(point.theta, point.B, model).z_star
    c_t = math.sqrt(theta_t / model.mean)
    c_0 = math.sqrt(point.theta / model.mean)
    tilted = float(probs @ log_cosh(c_t * atoms * z_t + point.B))
    untilted = float(probs @ log_cosh(c_0 * atoms * z_0 + point.B))
    return tilted - untilted + 0.5 * (z_0**2 - z_t**2) + _edge_mass(t, point)


def edge_cgf_derivative(t: float, point: ModelPoint) -> float:
    """phi'(t) = z*(t)^2 / 2 + e^t cosh(beta) E[W] / 2; the dz*/dt terms cancel."""
    z_t = solve_z_star(math.exp(t) * point.theta, point.B, point.model).z_star
    return 0.5 * z_t**2 + 0.5 * math.exp(t) * math.cosh(point.beta) * point.model.mean


def typical_edge_density(point: ModelPoint) -> float:
    """Edges per vertex, z*^2 / 2 + cosh(beta) E[W] / 2."""
    z_star = solve_z_star(point.theta, point.B, point.model).z_star
    return 0.5 * z_star**2 + 0.5 * math.cosh(point.beta) * point.model.mean


def edge_rate(y: float, point: ModelPoint) -> RateEval:
    """
    Legendre transform sup_t t y - phi(t) of the edge CGF.

    phi' is strictly increasing, so the optimal tilt solves phi'(t) = y.
    Densities that need |t| > 50 are reported as infinite.
    """
    location = (y, math.nan)
    if not np.isfinite(y) or y <= 0.0:
        return RateEval.infinite(location)

    bracket = expand_bracket(lambda t: edge_cgf_derivative(t, point), y, limit=TILT_LIMIT)
    if bracket is None:
        logger.warning(f"Edge density {y!r} needs a tilt beyond +/-{TILT_LIMIT}; rate reported infinite")
        return RateEval.infinite(location)

    t = monotone_root(lambda s: edge_cgf_derivative(s, point), y, bracket, xtol=1e-14)
    value = t * y - edge_cgf(t, point).value
    if value < 0.0:
        if value < -1e-9:
            logger.warning(f"Clipped negative edge rate {value:.3e} at y={y!r}")
        value = 0.0
    residual = abs(edge_cgf_derivative(t, point) - y)
    return RateEval(value=value, duals=(t, math.nan), location=location, residuals=(residual, 0.0))
