"""
Limiting degree laws under the annealed measure.

The degree of a vertex with weight w has moment generating function

    exp(cosh(beta) w (e^t - 1)) cosh(a z* e^t w + B) / cosh(a z* w + B),

a = sqrt(sinh(beta) / E[W]). Expanding the hyperbolic cosine writes it as
a two-component mixture of Poisson laws; when both rates are nonnegative
that mixture is an honest probability law with an explicit pmf.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.special import gammaln
from scipy.special import logsumexp
from scipy.special import xlogy

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import InvalidMixtureError
from annealed_ldp.core.exceptions import WeightValidationError
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.fixedpoint.solver import solve_z_star
from annealed_ldp.thermo.services import ModelPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegreeMixture:
    """
    Two-component mixed Poisson decomposition of a vertex degree.

    ``printed_weight_plus`` is the alternative weight with exponent
    (w + B) a z*; it coincides with ``weight_plus`` only at B = 0.
    """

    weight_plus: float
    weight_minus: float
    rate_plus: float
    rate_minus: float
    valid_pmf: bool
    a_beta: float
    printed_weight_plus: float

    def mgf(self, t: float) -> float:
        """Mixture moment generating function sum_Y P(Y) exp(rate_Y (e^t - 1))."""
        growth = math.expm1(t)
        return self.weight_plus * math.exp(self.rate_plus * growth) + self.weight_minus * math.exp(
            self.rate_minus * growth,
        )


def a_beta(point: ModelPoint) -> float:
    return math.sqrt(point.theta / point.model.mean)


def _check_weight(w: float) -> None:
    if not math.isfinite(w) or w <= 0:
        msg = f"Vertex weight must be finite and positive, got {w!r}"
        raise DomainError(msg)


def _log_degree_mgf(t: float, w: float, point: ModelPoint, z_star: float) -> float:
    scale = a_beta(point) * z_star * w
    return (
        math.cosh(point.beta) * w * math.expm1(t)
        + float(log_cosh(scale * math.exp(t) + point.B))
        - float(log_cosh(scale + point.B))
    )


def degree_mgf(t: float, w: float, point: ModelPoint) -> float:
    """
    Limiting E[e^{t D}] for a vertex of weight w.

    Args:
        t: Tilt
        w: Vertex weight, positive
        point: Model parameters

    Returns:
        The moment generating function, evaluated in log space
    """
    _check_weight(w)
    z_star = solve_z_star(point.theta, point.B, point.model).z_star
    return math.exp(_log_degree_mgf(t, w, point, z_star))


def uniform_degree_mgf(t: float, point: ModelPoint) -> float:
    """Degree MGF of a uniformly chosen vertex, averaged over the weight law."""
    atoms, probs = point.model.support
    z_star = solve_z_star(point.theta, point.B, point.model).z_star
    logs = np.array([_log_degree_mgf(t, float(a), point, z_star) for a in atoms])
    return float(probs @ np.exp(logs))


def joint_degree_mgf(ts: Sequence[float], ws: Sequence[float], point: ModelPoint) -> float:
    """Product form of the joint MGF of m fixed vertices' degrees."""
    if len(ts) != len(ws) or len(ts) == 0:
        msg = f"Need matching nonempty tilts and weights, got {len(ts)} and {len(ws)}"
        raise WeightValidationError(msg)
    for w in ws:
        _check_weight(w)
    z_star = solve_z_star(point.theta, point.B, point.model).z_star
    return math.exp(math.fsum(_log_degree_mgf(t, w, point, z_star) for t, w in zip(ts, ws, strict=True)))


def degree_mixture(w: float, point: ModelPoint) -> DegreeMixture:
    _check_weight(w)
    a = a_beta(point)
    z_star = solve_z_star(point.theta, point.B, point.model).z_star
    cosh_beta = math.cosh(point.beta)
    rate_plus = w * (cosh_beta + a * z_star)
    rate_minus = w * (cosh_beta - a * z_star)
    shift = w * a * z_star + point.B
    valid = rate_plus >= 0.0 and rate_minus >= 0.0
    if not valid:
        logger.warning(f"Degree mixture at w={w!r} has a negative rate; no pmf is available")
    return DegreeMixture(
        weight_plus=float(expit(2.0 * shift)),
        weight_minus=float(expit(-2.0 * shift)),
        rate_plus=rate_plus,
        rate_minus=rate_minus,
        valid_pmf=valid,
        a_beta=a,
        printed_weight_plus=float(expit(2.0 * (w + point.B) * a * z_star)),
    )


def degree_pmf(d: int, w: float, point: ModelPoint) -> float:
    """
    P(D = d) for the mixed Poisson degree law.

    Raises:
        InvalidMixtureError: when a mixture rate is negative
    """
    if int(d) != d or d < 0:
        msg = f"Degree must be a nonnegative integer, got {d!r}"
        raise DomainError(msg)
    mixture = degree_mixture(w, point)
    if not mixture.valid_pmf:
        msg = f"Degree mixture at w={w!r} is not a probability law (rate_minus={mixture.rate_minus:.6g})"
        raise InvalidMixtureError(msg)
    rates = np.array([mixture.rate_plus, mixture.rate_minus])
    weights = np.array([mixture.weight_plus, mixture.weight_minus])
    log_poisson = xlogy(d, rates) - rates - gammaln(d + 1)
    return float(np.exp(logsumexp(log_poisson, b=weights)))


def degree_factorial_moment(k: int, w: float, point: ModelPoint) -> float:
    """E[D (D - 1) ... (D - k + 1)] = sum_Y P(Y) rate_Y^k; defined even without a pmf."""
    if int(k) != k or k < 0:
        msg = f"Moment order must be a nonnegative integer, got {k!r}"
        raise DomainError(msg)
    mixture = degree_mixture(w, point)
    return mixture.weight_plus * mixture.rate_plus**k + mixture.weight_minus * mixture.rate_minus**k
