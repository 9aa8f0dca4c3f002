"""
Combinatorial route to the spin rate in the finite-type setting.

Counting configurations with a fraction (1 + m) / 2 of up-spins and a given
up-weight x = E[W 1{sigma = +1}] leads to the entropy functional

    I_m(x) = E[u log u + (1 - u) log(1 - u)],    u = expit(lambda1 W + lambda2),

with (lambda1, lambda2) fixed by E[u] = (1 + m) / 2 and E[W u] = x. The
spin rate is the infimum over x of a quadratic energy plus I_m(x).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.optimize import minimize_scalar
from scipy.special import entr
from scipy.special import expit
from scipy.special import logit

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import SolverError
from annealed_ldp.core.numerics import DUAL_LIMIT
from annealed_ldp.core.numerics import expand_bracket
from annealed_ldp.core.numerics import monotone_root
from annealed_ldp.legendre.entropy import RateEval
from annealed_ldp.legendre.entropy import achievable_weighted_interval
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import icw_pressure
from annealed_ldp.weights.distributions import WeightModel

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
SINGLE_TYPE_TOLERANCE = 1e-12
SEARCH_PIECES = 4
# Relative margin kept from the ends of the attainable up-weight interval.
BOUNDARY_MARGIN = 1e-7


@dataclass(frozen=True)
class LambdaPair:
    lambda1: float
    lambda2: float
    residuals: tuple[float, float]


def _up_fraction(m: float) -> float:
    if abs(m) >= 1.0:
        msg = f"Spin average must lie in (-1, 1), got {m!r}"
        raise DomainError(msg)
    return 0.5 * (1.0 + m)


def up_weight_interval(m: float, model: WeightModel) -> tuple[float, float]:
    """Attainable range of the up-weight x for a spin average m."""
    lo, hi = achievable_weighted_interval(m, model)
    return 0.5 * (lo + model.mean), 0.5 * (hi + model.mean)


def _second_multiplier(q: float, lambda1: float, model: WeightModel) -> float:
    atoms, probs = model.support
    center = float(logit(q))
    spread = atoms[-1] * abs(lambda1) + 1.0
    return brentq(
        lambda l2: float(probs @ expit(lambda1 * atoms + l2)) - q,
        center - spread,
        center + spread,
        xtol=1e-15,
        maxiter=500,
    )


def _residuals(l1, l2, q, x, model):
    atoms, probs = model.support
    u = expit(l1 * atoms + l2)
    return abs(float(probs @ u) - q), abs(float(probs @ (atoms * u)) - x)


def solve_lambda(m: float, x: float, model: WeightModel) -> LambdaPair:
    """
    Multipliers of the up-fraction and up-weight constraints.

    lambda2 is solved for the up-fraction at fixed lambda1, then lambda1
    for the up-weight along that constraint. With a single atom the two
    constraints coincide and lambda1 is pinned to 0.

    Raises:
        DomainError: x outside the open attainable interval for m
    """
    q = _up_fraction(m)
    atoms, probs = model.support

    if model.is_single_type:
        if abs(x - q * atoms[0]) > SINGLE_TYPE_TOLERANCE * max(1.0, float(atoms[0])):
            msg = f"With a single atom the up-weight must be {q * atoms[0]!r}, got {x!r}"
            raise DomainError(msg)
        l2 = float(logit(q))
        return LambdaPair(0.0, l2, (0.0, abs(float(expit(l2)) * atoms[0] - x)))

    lo, hi = up_weight_interval(m, model)
    if not lo < x < hi:
        msg = f"Up-weight {x!r} outside the attainable interval ({lo!r}, {hi!r}) for m={m!r}"
        raise DomainError(msg)

    def up_weight(l1):
        l2 = _second_multiplier(q, l1, model)
        return float(probs @ (atoms * expit(l1 * atoms + l2)))

    bracket = expand_bracket(up_weight, x, limit=2.0 * DUAL_LIMIT)
    if bracket is None:
        msg = f"Up-weight {x!r} too close to the boundary of ({lo!r}, {hi!r})"
        raise DomainError(msg)
    l1 = monotone_root(up_weight, x, bracket)
    l2 = _second_multiplier(q, l1, model)

    for _ in range(2):
        u = expit(l1 * atoms + l2)
        v = u * (1.0 - u)
        r = np.array([q - probs @ u, x - probs @ (atoms * u)])
        jac = np.array(
            [
                [probs @ (atoms * v), probs @ v],
                [probs @ (atoms * atoms * v), probs @ (atoms * v)],
            ],
        )
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            break
        if sum(_residuals(l1 + step[0], l2 + step[1], q, x, model)) > sum(_residuals(l1, l2, q, x, model)):
            break
        l1, l2 = l1 + step[0], l2 + step[1]

    residuals = _residuals(l1, l2, q, x, model)
    if max(residuals) > RESIDUAL_TOLERANCE:
        msg = "Multiplier residual above tolerance"
        raise SolverError(msg, {"m": m, "x": x, "lambda": (l1, l2), "residuals": residuals})
    return LambdaPair(float(l1), float(l2), residuals)


def combinatorial_entropy(m: float, x: float, model: WeightModel) -> float:
    """I_m(x) = E[u log u + (1 - u) log(1 - u)] at the solved multipliers."""
    pair = solve_lambda(m, x, model)
    atoms, probs = model.support
    u = expit(pair.lambda1 * atoms + pair.lambda2)
    return -float(probs @ (entr(u) + entr(1.0 - u)))


def combinatorial_spin_rate(m: float, point: ModelPoint) -> RateEval:
    """
    Spin rate from the finite-type counting argument.

    Minimizes over the up-weight x

        -theta E[W] / 2 - 2 theta x^2 / E[W] + 2 theta x - B m + I_m(x) + psi_ICW(theta, B)

    with theta = sinh(beta).
    """
    if abs(m) >= 1.0:
        return RateEval.infinite((m, math.nan))
    model = point.model
    theta, mean = point.theta, model.mean
    constant = -0.5 * theta * mean - point.B * m + icw_pressure(theta, point.B, model)

    @lru_cache(maxsize=None)
    def objective(x):
        energy = -2.0 * theta * x * x / mean + 2.0 * theta * x
        return energy + combinatorial_entropy(m, x, model) + constant

    if model.is_single_type:
        x = _up_fraction(m) * model.min_atom
    else:
        lo, hi = up_weight_interval(m, model)
        margin = BOUNDARY_MARGIN * (hi - lo)
        edges = np.linspace(lo + margin, hi - margin, SEARCH_PIECES + 1)
        candidates = [float(e) for e in edges]
        for a, b in zip(edges[:-1], edges[1:], strict=True):
            result = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
            candidates.append(float(result.x))
        x = min(candidates, key=objective)

    pair = solve_lambda(m, x, model)
    value = objective(x)
    if value < 0.0:
        if value < -1e-9:
            logger.warning(f"Clipped negative combinatorial rate {value:.3e} at m={m!r}")
        value = 0.0
    return RateEval(
        value=value,
        duals=(pair.lambda1, pair.lambda2),
        location=(m, x),
        residuals=pair.residuals,
    )
