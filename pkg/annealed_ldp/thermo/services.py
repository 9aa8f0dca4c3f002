"""
Closed-form thermodynamics of the annealed Ising model on the GRG.

The annealed pressure splits as alpha(beta) + psi_ICW(sinh beta, B), where
psi_ICW is the pressure of the inhomogeneous Curie-Weiss model at coupling
theta. Everything here is built on that single theta-parameterised core.
"""

import logging
import math
from dataclasses import dataclass
from dataclasses import replace

import numpy as np

from annealed_ldp.core.exceptions import DivergenceError
from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.numerics import LOG2
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.fixedpoint.solver import FixedPoint
from annealed_ldp.fixedpoint.solver import solve_z_star
from annealed_ldp.weights.distributions import WeightModel

logger = logging.getLogger(__name__)

CRITICAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ModelPoint:
    """Inverse temperature, external field and weight law."""

    beta: float
    B: float
    model: WeightModel

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0:
            msg = f"Inverse temperature must be finite and nonnegative, got {self.beta!r}"
            raise DomainError(msg)
        if not math.isfinite(self.B):
            msg = f"External field must be finite, got {self.B!r}"
            raise DomainError(msg)

    @property
    def theta(self) -> float:
        """Curie-Weiss coupling sinh(beta)."""
        return math.sinh(self.beta)

    def with_field(self, B: float) -> "ModelPoint":
        return replace(self, B=B)


@dataclass(frozen=True)
class ThermoReport:
    alpha: float
    psi_icw: float
    psi_an: float
    magnetization: float
    susceptibility: float
    z_star: float
    beta_c: float
    susceptibility_one_sided: bool = False


def alpha(beta: float, model: WeightModel) -> float:
    """Edge-count correction (cosh(beta) - 1) E[W] / 2."""
    if beta < 0:
        msg = f"Inverse temperature must be nonnegative, got {beta!r}"
        raise DomainError(msg)
    return 0.5 * (math.cosh(beta) - 1.0) * model.mean


def icw_pressure_from(fixed_point: FixedPoint, model: WeightModel) -> float:
    """psi_ICW evaluated at an already solved fixed point."""
    atoms, probs = model.support
    theta, B, z = fixed_point.coupling, fixed_point.field, fixed_point.z_star
    c = math.sqrt(theta / model.mean)
    return LOG2 + float(probs @ log_cosh(c * atoms * z + B)) - 0.5 * z * z


def icw_pressure(theta: float, B: float, model: WeightModel) -> float:
    """
    Limit pressure of the inhomogeneous Curie-Weiss model.

    Args:
        theta: Effective coupling, nonnegative
        B: External field
        model: Weight law

    Returns:
        log 2 + E[log cosh(c W z* + B)] - z*^2 / 2 with c = sqrt(theta / E[W])
    """
    return icw_pressure_from(solve_z_star(theta, B, model), model)


def annealed_pressure(point: ModelPoint) -> float:
    return alpha(point.beta, point.model) + icw_pressure(point.theta, point.B, point.model)


def critical_beta(model: WeightModel) -> float:
    return math.asinh(model.mean / model.second_moment)


def _magnetization_from(fixed_point: FixedPoint, model: WeightModel) -> float:
    atoms, probs = model.support
    c = math.sqrt(fixed_point.coupling / model.mean)
    return float(probs @ np.tanh(c * atoms * fixed_point.z_star + fixed_point.field))


def magnetization(point: ModelPoint) -> float:
    """E[tanh(sqrt(sinh(beta) / E[W]) W z* + B)]; the positive branch at B = 0."""
    return _magnetization_from(solve_z_star(point.theta, point.B, point.model), point.model)


def spontaneous_magnetization(beta: float, model: WeightModel) -> float:
    """m+ = lim_{B -> 0+} of the magnetization; zero at and above the critical temperature."""
    return magnetization(ModelPoint(beta=beta, B=0.0, model=model))


def in_uniqueness_regime(point: ModelPoint) -> bool:
    return point.B != 0.0 or point.beta < critical_beta(point.model)


def _susceptibility(point: ModelPoint) -> tuple[float, bool]:
    beta_c = critical_beta(point.model)
    if point.B == 0.0 and abs(point.beta - beta_c) <= CRITICAL_TOLERANCE:
        msg = f"Susceptibility diverges at the critical point beta_c={beta_c:.12g}, B=0"
        raise DivergenceError(msg)

    h = max(1e-5, 1e-5 * abs(point.B))

    def m(B):
        return magnetization(point.with_field(B))

    # Above beta_c the magnetization jumps at B = 0, so stay on the side of B.
    if point.beta > beta_c and abs(point.B) < 2 * h:
        side = -1.0 if point.B < 0 else 1.0
        base = m(point.B)

        def forward(step):
            return (m(point.B + side * step) - base) / (side * step)

        return 2.0 * forward(h / 2) - forward(h), True

    def central(step):
        return (m(point.B + step) - m(point.B - step)) / (2.0 * step)

    return (4.0 * central(h / 2) - central(h)) / 3.0, False


def susceptibility(point: ModelPoint) -> float:
    """
    dM/dB by Richardson-extrapolated finite differences.

    At B = 0 above the critical temperature the one-sided derivative from
    B > 0 is returned. Raises DivergenceError at (beta_c, B = 0).
    """
    return _susceptibility(point)[0]


def thermo_report(point: ModelPoint) -> ThermoReport:
    fixed_point = solve_z_star(point.theta, point.B, point.model)
    psi_icw = icw_pressure_from(fixed_point, point.model)
    a = alpha(point.beta, point.model)
    try:
        chi, one_sided = _susceptibility(point)
    except DivergenceError:
        logger.warning(f"Susceptibility diverges at beta={point.beta!r}, B=0")
        chi, one_sided = math.inf, False
    return ThermoReport(
        alpha=a,
        psi_icw=psi_icw,
        psi_an=a + psi_icw,
        magnetization=_magnetization_from(fixed_point, point.model),
        susceptibility=chi,
        z_star=fixed_point.z_star,
        beta_c=critical_beta(point.model),
        susceptibility_one_sided=one_sided,
    )
