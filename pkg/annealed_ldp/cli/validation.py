"""
Self-checks behind ``validate``.

Each check reproduces one acceptance property of the library: pressure
consistency, the critical point, rate-function identities, low-temperature
non-convexity, oracle agreement, finite-n trends, edge and degree
identities, Monte Carlo concordance and the finite-type machinery. The
``quick`` suite runs reduced sizes of the same checks; ``acceptance`` runs
them at full size.
"""

import itertools
import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from django.db import models
from scipy.special import expit

from annealed_ldp.degrees.laws import degree_factorial_moment
from annealed_ldp.degrees.laws import degree_mgf
from annealed_ldp.degrees.laws import degree_mixture
from annealed_ldp.degrees.laws import degree_pmf
from annealed_ldp.degrees.laws import uniform_degree_mgf
from annealed_ldp.edge_ldp.cgf import edge_cgf
from annealed_ldp.edge_ldp.cgf import edge_cgf_derivative
from annealed_ldp.edge_ldp.cgf import edge_rate
from annealed_ldp.edge_ldp.cgf import typical_edge_density
from annealed_ldp.fixedpoint.solver import solve_z_star_zero_field
from annealed_ldp.legendre.entropy import achievable_weighted_interval
from annealed_ldp.legendre.entropy import entropy_rate
from annealed_ldp.mc.glauber import McConfig
from annealed_ldp.mc.glauber import boltzmann_distribution
from annealed_ldp.mc.glauber import glauber_run
from annealed_ldp.mc.glauber import transition_matrix
from annealed_ldp.oracle.brute_force import brute_force_log_partition
from annealed_ldp.oracle.enumeration import ExactInstance
from annealed_ldp.oracle.enumeration import exact_degree_mgf
from annealed_ldp.oracle.enumeration import exact_icw_spin_distribution
from annealed_ldp.oracle.enumeration import exact_log_edge_mgf
from annealed_ldp.oracle.enumeration import exact_log_partition
from annealed_ldp.oracle.enumeration import exact_spin_distribution
from annealed_ldp.oracle.enumeration import multihypergeometric_conditional
from annealed_ldp.oracle.enumeration import nearest_admissible_total
from annealed_ldp.spin_ldp.combinatorial import combinatorial_entropy
from annealed_ldp.spin_ldp.combinatorial import combinatorial_spin_rate
from annealed_ldp.spin_ldp.combinatorial import solve_lambda
from annealed_ldp.spin_ldp.combinatorial import up_weight_interval
from annealed_ldp.spin_ldp.rates import PressureForm
from annealed_ldp.spin_ldp.rates import joint_rate
from annealed_ldp.spin_ldp.rates import joint_rate_alt
from annealed_ldp.spin_ldp.rates import pressure_variational
from annealed_ldp.spin_ldp.rates import spin_rate
from annealed_ldp.spin_ldp.rates import spin_rate_highT
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import annealed_pressure
from annealed_ldp.thermo.services import critical_beta
from annealed_ldp.thermo.services import magnetization
from annealed_ldp.thermo.services import spontaneous_magnetization
from annealed_ldp.weights.distributions import make_finite_type

logger = logging.getLogger(__name__)

TWO_TYPE = make_finite_type((1.0, 3.0), (0.5, 0.5))
ORACLE_ATOMS = (1.0, 2.0, 4.0)
ORACLE_DRAWS = 50
TREND_SIZES = (50, 100, 200, 400, 800)
MC_SEED = 20240817


class Suite(models.TextChoices):
    QUICK = "quick", "Reduced sizes"
    ACCEPTANCE = "acceptance", "Full acceptance sizes"


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class Outcome:
    passed: bool
    detail: str


CheckFunc = Callable[[bool, int], Outcome]
REGISTRY: list[tuple[int, str, CheckFunc]] = []


def criterion(number: int, name: str) -> Callable[[CheckFunc], CheckFunc]:
    def register(func: CheckFunc) -> CheckFunc:
        REGISTRY.append((number, name, func))
        return func

    return register


def _within(deviation: float, tolerance: float) -> Outcome:
    return Outcome(deviation <= tolerance, f"max deviation {deviation:.3e} (tolerance {tolerance:.0e})")


def _decreasing(values) -> bool:
    return all(later < earlier for earlier, later in itertools.pairwise(values))


@criterion(1, "pressure consistency")
def check_pressures(full: bool, seed: int) -> Outcome:
    deviation = 0.0
    for beta, B in itertools.product((0.2, critical_beta(TWO_TYPE), 0.8), (0.0, 0.1, 0.5)):
        point = ModelPoint(beta=beta, B=B, model=TWO_TYPE)
        expected = annealed_pressure(point)
        for form in PressureForm:
            deviation = max(deviation, abs(pressure_variational(point, form) - expected))
    return _within(deviation, 1e-8)


@criterion(2, "critical temperature")
def check_critical(full: bool, seed: int) -> Outcome:
    beta_c = critical_beta(TWO_TYPE)
    error = abs(beta_c - math.asinh(0.4))
    offsets = range(1, 11 if full else 3)
    below = [solve_z_star_zero_field(math.sinh(beta_c - 1e-3 * k), TWO_TYPE).z_star for k in offsets]
    above = [solve_z_star_zero_field(math.sinh(beta_c + 1e-3 * k), TWO_TYPE).z_star for k in offsets]
    passed = error <= 1e-12 and all(z == 0.0 for z in below) and all(z > 0.0 for z in above)
    return Outcome(passed, f"|beta_c - asinh(0.4)| = {error:.1e}, smallest z* above = {min(above):.3e}")


@criterion(3, "rate function identities")
def check_rate_identities(full: bool, seed: int) -> Outcome:
    point = ModelPoint(beta=0.8, B=0.1, model=TWO_TYPE)
    joint = 0.0
    for x1 in (-0.6, -0.3, 0.0, 0.3, 0.6):
        lo, hi = achievable_weighted_interval(x1, TWO_TYPE)
        for fraction in (0.1, 0.3, 0.5, 0.7, 0.9):
            x2 = lo + fraction * (hi - lo)
            joint = max(joint, abs(joint_rate(x1, x2, point).value - joint_rate_alt(x1, x2, point).value))

    high_t = ModelPoint(beta=0.2, B=0.0, model=TWO_TYPE)
    legendre = max(
        abs(spin_rate_highT(m / 10, high_t).value - spin_rate(m / 10, high_t).value) for m in range(-8, 9)
    )

    grid = [k / 10 for k in range(-9, 10)] if full else [-0.9, -0.4, 0.0, 0.5, 0.9]
    counting = 0.0
    for beta, B in itertools.product((0.2, 0.8), (0.0, 0.3)):
        point = ModelPoint(beta=beta, B=B, model=TWO_TYPE)
        for m in grid:
            counting = max(counting, abs(combinatorial_spin_rate(m, point).value - spin_rate(m, point).value))

    passed = joint <= 1e-8 and legendre <= 1e-6 and counting <= 1e-6
    return Outcome(passed, f"joint {joint:.2e}, high-T {legendre:.2e}, combinatorial {counting:.2e}")


@criterion(4, "low-temperature non-convexity")
def check_flat_piece(full: bool, seed: int) -> Outcome:
    point = ModelPoint(beta=0.8, B=0.0, model=TWO_TYPE)
    m_plus = spontaneous_magnetization(0.8, TWO_TYPE)
    at_modes = max(spin_rate(m_plus, point).value, spin_rate(-m_plus, point).value)
    at_zero = spin_rate(0.0, point).value
    legendre = spin_rate_highT(0.0, point)
    passed = m_plus > 0 and at_modes <= 1e-8 and at_zero >= 1e-3 and legendre.value <= 1e-8 and legendre.non_exposed
    return Outcome(
        passed,
        f"m+ = {m_plus:.6f}, I(m+) = {at_modes:.1e}, I(0) = {at_zero:.4f}, flat piece = {legendre.non_exposed}",
    )


def _count_vectors(max_vertices: int):
    for size in range(1, len(ORACLE_ATOMS) + 1):
        for counts in itertools.product(range(1, max_vertices + 1), repeat=size):
            if sum(counts) <= max_vertices:
                yield counts, ORACLE_ATOMS[:size]


@criterion(5, "oracle against brute force")
def check_oracle(full: bool, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    draws = list(zip(rng.uniform(0.0, 1.5, ORACLE_DRAWS), rng.uniform(-1.0, 1.0, ORACLE_DRAWS), strict=True))
    worst, cases = 0.0, 0
    for counts, atoms in _count_vectors(12 if full else 6):
        for beta, B in draws:
            inst = ExactInstance(counts, atoms, float(beta), float(B))
            brute = brute_force_log_partition(inst.weight_sequence, inst.beta, inst.B)
            worst = max(worst, abs(exact_log_partition(inst) - brute) / abs(brute))
            cases += 1
    outcome = _within(worst, 1e-10)
    return Outcome(outcome.passed, f"{cases} instances, relative {outcome.detail}")


@criterion(6, "finite-n convergence trends")
def check_trends(full: bool, seed: int) -> Outcome:
    sizes = TREND_SIZES if full else TREND_SIZES[:3]
    failures = []

    for beta, B in ((0.2, 0.1), (0.8, 0.0), (0.8, 0.3)):
        point = ModelPoint(beta=beta, B=B, model=TWO_TYPE)
        limit = annealed_pressure(point)
        instances = [ExactInstance.from_model(TWO_TYPE, n, beta, B) for n in sizes]
        gaps = [abs(exact_log_partition(inst) / inst.n - limit) for inst in instances]
        if not _decreasing(gaps) or (full and gaps[-1] > 5e-3):
            failures.append(f"pressure({beta}, {B})")

        laws = [exact_spin_distribution(inst) for inst in instances]
        for m in (0.0, 0.4, -0.4):
            rate = spin_rate(m, point).value
            gaps = [
                abs(-law.log_probability(nearest_admissible_total(m, n)) / n - rate)
                for law, n in zip(laws, sizes, strict=True)
            ]
            if not _decreasing(gaps) or (full and gaps[-1] > 2e-2):
                failures.append(f"spin({beta}, {B}, m={m})")

    reference = ModelPoint(beta=0.8, B=0.1, model=TWO_TYPE)
    instances = [ExactInstance.from_model(TWO_TYPE, n, 0.8, 0.1) for n in sizes]
    for t in (-0.5, 0.5):
        limit = edge_cgf(t, reference).value
        if not _decreasing([abs(exact_log_edge_mgf(t, inst) / inst.n - limit) for inst in instances]):
            failures.append(f"edges(t={t})")
    for t in (-1.0, 0.5, 1.0):
        limit = degree_mgf(t, 3.0, reference)
        errors = [abs(exact_degree_mgf(t, 1, inst) / limit - 1) for inst in instances]
        if not _decreasing(errors) or (full and errors[-1] > 1e-2):
            failures.append(f"degree(t={t})")

    detail = f"sizes {list(sizes)}: " + ("all trends hold" if not failures else "failed " + ", ".join(failures))
    return Outcome(not failures, detail)


@criterion(7, "edge identities")
def check_edges(full: bool, seed: int) -> Outcome:
    point = ModelPoint(beta=0.8, B=0.1, model=TWO_TYPE)
    free = ModelPoint(beta=0.0, B=0.0, model=TWO_TYPE)
    h = 1e-5
    at_zero = abs(edge_cgf(0.0, point).value)
    derivative = max(
        abs(edge_cgf_derivative(t, point) - (edge_cgf(t + h, point).value - edge_cgf(t - h, point).value) / (2 * h))
        for t in (-1.0, 0.0, 1.0)
    )
    poisson = max(abs(edge_cgf(t, free).value - 0.5 * math.expm1(t) * TWO_TYPE.mean) for t in (-1.0, 0.3, 1.0))
    typical = typical_edge_density(point)
    rate = abs(edge_rate(typical, point).value)
    slope = (uniform_degree_mgf(h, point) - uniform_degree_mgf(-h, point)) / (2 * h)
    uniform = abs(slope - 2 * typical)
    passed = at_zero <= 1e-12 and derivative <= 1e-6 and poisson <= 1e-12 and rate <= 1e-10 and uniform <= 1e-8
    return Outcome(
        passed,
        f"phi(0) {at_zero:.1e}, phi' {derivative:.1e}, free {poisson:.1e}, rate {rate:.1e}, mean degree {uniform:.1e}",
    )


@criterion(8, "degree mixture")
def check_degrees(full: bool, seed: int) -> Outcome:
    point = ModelPoint(beta=0.8, B=0.1, model=TWO_TYPE)
    reconstruction, total, mean = 0.0, 0.0, 0.0
    for w in TWO_TYPE.atoms:
        mixture = degree_mixture(w, point)
        for t in (-1.0, 0.5):
            reconstruction = max(reconstruction, abs(mixture.mgf(t) - degree_mgf(t, w, point)))
        if mixture.valid_pmf:
            pmf = np.array([degree_pmf(d, w, point) for d in range(201)])
            total = max(total, abs(pmf.sum() - 1.0))
            mean = max(mean, abs(pmf @ np.arange(201) - degree_factorial_moment(1, w, point)))
    passed = reconstruction <= 1e-10 and total <= 1e-9 and mean <= 1e-8
    return Outcome(passed, f"mgf {reconstruction:.1e}, mass {total:.1e}, mean {mean:.1e}")


def _finite_icw_magnetization(counts, atoms, beta, B) -> float:
    law = exact_icw_spin_distribution(ExactInstance(counts, atoms, beta, B))
    return float(law.probabilities @ law.totals) / sum(counts)


@criterion(9, "Monte Carlo concordance")
def check_monte_carlo(full: bool, seed: int) -> Outcome:
    theta, B = math.sinh(0.8), 0.2
    matrix = transition_matrix((1, 2), (1.0, 3.0), theta, B)
    pi = boltzmann_distribution((1, 2), (1.0, 3.0), theta, B)
    distance = 0.5 * float(np.abs(np.linalg.matrix_power(matrix, 4096)[0] - pi).sum())
    flows = pi[:, None] * matrix
    balance = float(np.abs(flows - flows.T).max())

    if full:
        config = McConfig((1000, 1000), (1.0, 3.0), theta, B, sweeps=100_000, burn_in=1000, seed=MC_SEED)
        width, slack = 3.0, 2e-3
    else:
        config = McConfig((200, 200), (1.0, 3.0), theta, B, sweeps=6000, burn_in=200, seed=11)
        width, slack = 4.0, None
    result = glauber_run(config)
    finite = _finite_icw_magnetization(config.counts, config.atoms, 0.8, B)
    passed = distance <= 1e-10 and balance <= 1e-14
    passed = passed and abs(result.mean_magnetization - finite) <= width * result.std_error
    detail = f"m = {result.mean_magnetization:.5f} +/- {result.std_error:.1e}, finite-n {finite:.5f}"
    if slack is not None:
        limit = magnetization(ModelPoint(beta=0.8, B=B, model=TWO_TYPE))
        passed = passed and abs(result.mean_magnetization - limit) <= width * result.std_error + slack
        detail += f", limit {limit:.5f}"
    return Outcome(passed, f"{detail}, TV {distance:.1e}")


@criterion(10, "finite-type machinery")
def check_combinatorics(full: bool, seed: int) -> Outcome:
    atoms, probs = TWO_TYPE.support
    residual, identity = 0.0, 0.0
    for m in (-0.7, -0.2, 0.0, 0.3, 0.8):
        lo, hi = up_weight_interval(m, TWO_TYPE)
        for fraction in (0.1, 0.5, 0.9):
            x = lo + fraction * (hi - lo)
            pair = solve_lambda(m, x, TWO_TYPE)
            u = expit(pair.lambda1 * atoms + pair.lambda2)
            residual = max(residual, abs(probs @ u - 0.5 * (1 + m)), abs(probs @ (atoms * u) - x))
            expected = entropy_rate(m, 2 * x - TWO_TYPE.mean, TWO_TYPE).value - math.log(2)
            identity = max(identity, abs(combinatorial_entropy(m, x, TWO_TYPE) - expected))

    inst = ExactInstance((5, 7), (1.0, 3.0), 0.0, 0.0)
    normalisation = max(
        abs(math.fsum(multihypergeometric_conditional((q, m_plus - q), inst, m_plus) for q in range(6)) - 1.0)
        for m_plus in range(13)
    )
    passed = residual <= 1e-10 and identity <= 1e-8 and normalisation <= 1e-12
    return Outcome(passed, f"residuals {residual:.1e}, entropy {identity:.1e}, normalisation {normalisation:.1e}")


def run_suite(suite: str = Suite.QUICK, seed: int = 0) -> list[Check]:
    """Run every registered check; a check that raises is reported as failed."""
    if suite not in Suite.values:
        msg = f"Unknown suite {suite!r}; choose from {', '.join(Suite.values)}"
        raise ValueError(msg)
    full = suite == Suite.ACCEPTANCE
    checks = []
    for number, name, func in sorted(REGISTRY, key=lambda entry: entry[0]):
        started = time.perf_counter()
        try:
            outcome = func(full, seed)
        except Exception as exc:
            logger.exception(f"Check {number} ({name}) raised")
            outcome = Outcome(False, f"{type(exc).__name__}: {exc}")
        elapsed = time.perf_counter() - started
        logger.info(f"Check {number} ({name}): {'PASS' if outcome.passed else 'FAIL'} in {elapsed:.2f}s")
        checks.append(Check(number, name, outcome.passed, outcome.detail, elapsed))
    return checks
