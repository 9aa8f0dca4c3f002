"""
Scalar fixed point z* of the inhomogeneous Curie-Weiss model.

For an effective coupling theta >= 0 and field B, z* solves

    z = E[ c W tanh(c W z + B) ],    c = sqrt(theta / E[W]).

theta = sinh(beta) gives the annealed order parameter z*(beta, B);
theta = e^t sinh(beta) gives the edge-tilted z*(t, beta, B).
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy.optimize import bisect

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import SolverError
from annealed_ldp.weights.distributions import WeightModel

logger = logging.getLogger(__name__)

BISECTION_WIDTH = 1e-10
NEWTON_STEPS = 2
RESIDUAL_TOLERANCE = 1e-12
MAX_HALVINGS = 60
# Slopes within this distance of 1 are treated as critical (no positive root).
CRITICAL_SLOPE_TOLERANCE = 1e-12


class Branch(StrEnum):
    SIGNED = "signed"
    ZERO = "zero"
    LARGEST_POSITIVE = "largest_positive"


@dataclass(frozen=True)
class FixedPoint:
    z_star: float
    residual: float
    coupling: float
    field: float
    branch: str
    bracket: tuple[float, float] = (0.0, 0.0)

    def mirrored(self) -> "FixedPoint":
        """The solution for the opposite field."""
        lo, hi = self.bracket
        return FixedPoint(
            z_star=-self.z_star,
            residual=self.residual,
            coupling=self.coupling,
            field=-self.field,
            branch=self.branch,
            bracket=(-hi, -lo),
        )


def fixed_point_map(z: float, theta: float, B: float, model: WeightModel) -> float:
    """g(z) = E[c W tanh(c W z + B)]."""
    atoms, probs = model.support
    c = math.sqrt(theta / model.mean)
    return c * float(probs @ (atoms * np.tanh(c * atoms * z + B)))


def _residual_and_slope(z, theta, B, model):
    atoms, probs = model.support
    c = math.sqrt(theta / model.mean)
    th = np.tanh(c * atoms * z + B)
    g = c * float(probs @ (atoms * th))
    dg = c * c * float(probs @ (atoms * atoms * (1.0 - th * th)))
    return g - z, dg - 1.0


def _newton_polish(z, theta, B, model, lo, hi):
    for _ in range(NEWTON_STEPS):
        value, slope = _residual_and_slope(z, theta, B, model)
        if value == 0.0 or slope == 0.0:
            break
        candidate = z - value / slope
        if not lo <= candidate <= hi:
            break
        z = candidate
    return z


def _finish(z, theta, B, model, branch, bracket):
    residual = abs(fixed_point_map(z, theta, B, model) - z)
    if residual > RESIDUAL_TOLERANCE * max(1.0, abs(z)):
        msg = "Fixed point residual above tolerance"
        raise SolverError(
            msg,
            {"theta": theta, "B": B, "z": z, "residual": residual, "bracket": bracket},
        )
    return FixedPoint(
        z_star=float(z),
        residual=residual,
        coupling=theta,
        field=B,
        branch=branch,
        bracket=bracket,
    )


def _check_coupling(theta: float) -> None:
    if not math.isfinite(theta) or theta < 0:
        msg = f"Coupling must be finite and nonnegative, got {theta!r}"
        raise DomainError(msg)


def _solve_positive_field(theta: float, B: float, model: WeightModel) -> FixedPoint:
    # |g(z)| <= sqrt(theta E[W]) bounds the root; g(0) > 0 for B > 0.
    upper = math.sqrt(theta * model.mean)

    def h(z):
        return fixed_point_map(z, theta, B, model) - z

    if h(upper) >= 0.0:
        return _finish(upper, theta, B, model, Branch.SIGNED, (upper, upper))

    z = bisect(h, 0.0, upper, xtol=BISECTION_WIDTH, maxiter=200)
    lo, hi = max(0.0, z - BISECTION_WIDTH), min(upper, z + BISECTION_WIDTH)
    z = _newton_polish(z, theta, B, model, lo, hi)
    return _finish(z, theta, B, model, Branch.SIGNED, (lo, hi))


def solve_z_star(theta: float, B: float, model: WeightModel) -> FixedPoint:
    """
    Solve the fixed-point equation for any coupling and field.

    For B != 0 the root with the sign of B is returned; B = 0 dispatches to
    ``solve_z_star_zero_field``.

    Args:
        theta: Effective coupling, nonnegative
        B: External field
        model: Weight law

    Returns:
        FixedPoint with residual below 1e-12 relative to max(1, |z*|)
    """
    _check_coupling(theta)
    if theta == 0.0:
        return FixedPoint(0.0, 0.0, theta, B, Branch.ZERO)
    if B == 0.0:
        return solve_z_star_zero_field(theta, model)
    if B < 0.0:
        return _solve_positive_field(theta, -B, model).mirrored()
    return _solve_positive_field(theta, B, model)


def solve_z_star_zero_field(theta: float, model: WeightModel) -> FixedPoint:
    """
    Largest nonnegative root of z = g(z) at B = 0.

    The map is odd and concave on z > 0 with slope theta E[W^2] / E[W] at
    the origin, so a positive root exists exactly when that slope exceeds 1.
    """
    _check_coupling(theta)
    slope = theta * model.second_moment / model.mean
    if slope <= 1.0 + CRITICAL_SLOPE_TOLERANCE:
        return FixedPoint(0.0, 0.0, theta, 0.0, Branch.ZERO)

    upper = math.sqrt(theta * model.mean)

    def h(z):
        return fixed_point_map(z, theta, 0.0, model) - z

    if h(upper) >= 0.0:
        return _finish(upper, theta, 0.0, model, Branch.LARGEST_POSITIVE, (upper, upper))

    eps = upper
    for _ in range(MAX_HALVINGS):
        eps /= 2.0
        if h(eps) > 0.0:
            break
    else:
        logger.debug(f"No positive root found below {eps:.3g} at theta={theta!r}; returning 0")
        return FixedPoint(0.0, 0.0, theta, 0.0, Branch.ZERO)

    hi = min(2.0 * eps, upper)
    z = bisect(h, eps, hi, xtol=BISECTION_WIDTH, maxiter=200)
    lo, hi = max(eps, z - BISECTION_WIDTH), min(hi, z + BISECTION_WIDTH)
    z = _newton_polish(z, theta, 0.0, model, lo, hi)
    return _finish(z, theta, 0.0, model, Branch.LARGEST_POSITIVE, (lo, hi))
