"""
Heat-bath Glauber dynamics for the inhomogeneous Curie-Weiss model

    P(sigma) ~ exp(theta / (2 l_n) (sum_i w_i s_i)^2 + B sum_i s_i).

Every update picks a uniform site and resamples its spin from the
conditional law given the rest, so only the running weighted sum is needed.
Random numbers come from numpy's counter-based Philox generator and are
drawn in blocks outside the compiled kernel, which keeps a run
reproducible from (config, seed) alone.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field

import numba
import numpy as np
from scipy.special import logsumexp
from scipy.special import softmax

from annealed_ldp.core.conf import setting
from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import WeightValidationError
from annealed_ldp.oracle.brute_force import all_spin_configurations

logger = logging.getLogger(__name__)

RNG_NAME = "Philox"
SWEEPS_PER_BLOCK = 64
MAX_EXACT_VERTICES = 12


@dataclass(frozen=True)
class McConfig:
    counts: tuple[int, ...]
    atoms: tuple[float, ...]
    theta: float
    B: float
    sweeps: int
    burn_in: int
    seed: int
    thin: int = 1

    def __post_init__(self):
        if len(self.counts) != len(self.atoms) or len(self.counts) == 0:
            msg = f"Need one count per atom, got {len(self.counts)} counts and {len(self.atoms)} atoms"
            raise WeightValidationError(msg)
        if any(int(c) != c or c < 0 for c in self.counts) or sum(self.counts) == 0:
            msg = f"Counts must be nonnegative integers with at least one vertex: {tuple(self.counts)}"
            raise WeightValidationError(msg)
        if any(a <= 0 or not math.isfinite(a) for a in self.atoms):
            msg = f"Atoms must be finite and strictly positive: {tuple(self.atoms)}"
            raise WeightValidationError(msg)
        if not math.isfinite(self.theta) or self.theta < 0 or not math.isfinite(self.B):
            msg = f"Need a finite nonnegative coupling and finite field, got theta={self.theta!r}, B={self.B!r}"
            raise DomainError(msg)
        if not self.sweeps > self.burn_in >= 0 or self.thin < 1:
            msg = f"Need sweeps > burn_in >= 0 and thin >= 1, got {self.sweeps}, {self.burn_in}, {self.thin}"
            raise DomainError(msg)
        if not 0 <= self.seed < 2**64:
            msg = f"Seed must be a 64-bit unsigned integer, got {self.seed!r}"
            raise DomainError(msg)
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "atoms", tuple(float(a) for a in self.atoms))

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(np.asarray(self.atoms), self.counts)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "McConfig":
        return cls(**{**data, "counts": tuple(data["counts"]), "atoms": tuple(data["atoms"])})


@dataclass(frozen=True)
class McResult:
    mean_magnetization: float
    std_error: float
    mean_weighted_magnetization: float
    weighted_std_error: float
    samples_used: int
    seed_echo: int
    weighted_sum_drift: float
    rng: str = RNG_NAME
    magnetizations: np.ndarray = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("magnetizations")
        return data


@numba.njit(cache=True)
def flip_up_probability(weighted_rest, w, coupling, B):
    """P(s_i = +1 | rest) = 1 / (1 + exp(-2h)), h = theta w_i S_rest / l_n + B."""
    h = coupling * w * weighted_rest + B
    return 1.0 / (1.0 + math.exp(-2.0 * h))


@numba.njit(cache=True)
def _heat_bath_block(spins, weights, weighted_sum, total, sites, uniforms, coupling, B, out_m, out_x, weight_total):
    """Run len(sites) // n updates, recording (m, weighted m) after each sweep."""
    n = spins.shape[0]
    sweeps = sites.shape[0] // n
    for sweep in range(sweeps):
        for k in range(sweep * n, (sweep + 1) * n):
            i = sites[k]
            w = weights[i]
            old = spins[i]
            rest = weighted_sum - w * old
            new = 1 if uniforms[k] < flip_up_probability(rest, w, coupling, B) else -1
            if new != old:
                spins[i] = new
                weighted_sum = rest + w * new
                total += new - old
        out_m[sweep] = total / n
        out_x[sweep] = weighted_sum / weight_total
    return weighted_sum, total


def _batch_means(samples: np.ndarray, batches: int) -> tuple[float, float]:
    """Mean and batch-means standard error; trailing samples that do not fill a batch are dropped."""
    batches = min(batches, samples.size)
    if batches < 2:
        logger.warning(f"Only {samples.size} samples; batch-means error unavailable")
        return float(samples.mean()), 0.0
    size = samples.size // batches
    means = samples[: batches * size].reshape(batches, size).mean(axis=1)
    return float(samples.mean()), float(means.std(ddof=1) / math.sqrt(batches))


def glauber_run(config: McConfig) -> McResult:
    """
    Sample the inhomogeneous Curie-Weiss model by random-site heat bath.

    One sweep is n single-site updates. The chain starts aligned with the
    field, or from uniform spins when B = 0. Observables are recorded after
    every sweep past ``burn_in`` and kept every ``thin`` sweeps.

    Args:
        config: Model, run length and seed

    Returns:
        McResult with batch-means standard errors
    """
    weights = config.weights
    n = weights.size
    weight_total = float(weights.sum())
    coupling = config.theta / weight_total
    rng = np.random.Generator(np.random.Philox(config.seed))

    if config.B == 0.0:
        spins = rng.choice(np.array([-1, 1], dtype=np.int64), size=n)
    else:
        spins = np.full(n, 1 if config.B > 0 else -1, dtype=np.int64)
    weighted_sum = float(weights @ spins)
    total = int(spins.sum())
    out_m = np.empty(config.sweeps)
    out_x = np.empty(config.sweeps)

    logger.info(f"Glauber run n={n} theta={config.theta!r} B={config.B!r} sweeps={config.sweeps} seed={config.seed}")
    for start in range(0, config.sweeps, SWEEPS_PER_BLOCK):
        block = min(SWEEPS_PER_BLOCK, config.sweeps - start)
        sites = rng.integers(0, n, size=block * n)
        uniforms = rng.random(block * n)
        weighted_sum, total = _heat_bath_block(
            spins,
            weights,
            weighted_sum,
            total,
            sites,
            uniforms,
            coupling,
            config.B,
            out_m[start : start + block],
            out_x[start : start + block],
            weight_total,
        )

    drift = abs(weighted_sum - float(weights @ spins))
    if drift > 1e-9:
        logger.warning(f"Running weighted sum drifted by {drift:.3e}")

    kept = slice(config.burn_in, config.sweeps, config.thin)
    batches = int(setting("ANNEALED_LDP_MC_BATCHES", 20))
    mean_m, error_m = _batch_means(out_m[kept], batches)
    mean_x, error_x = _batch_means(out_x[kept], batches)
    return McResult(
        mean_magnetization=mean_m,
        std_error=error_m,
        mean_weighted_magnetization=mean_x,
        weighted_std_error=error_x,
        samples_used=int(out_m[kept].size),
        seed_echo=config.seed,
        weighted_sum_drift=drift,
        magnetizations=out_m[kept],
    )


def _check_small(counts: Sequence[int]) -> np.ndarray:
    if sum(counts) > MAX_EXACT_VERTICES:
        msg = f"Exact kernels are limited to {MAX_EXACT_VERTICES} vertices, got {sum(counts)}"
        raise DomainError(msg)
    return all_spin_configurations(sum(counts))


def boltzmann_distribution(counts: Sequence[int], atoms: Sequence[float], theta: float, B: float) -> np.ndarray:
    """Exact Gibbs weights over the 2^n configurations of ``all_spin_configurations``."""
    spins = _check_small(counts)
    weights = np.repeat(np.asarray(atoms, dtype=float), counts)
    energy = theta / (2.0 * weights.sum()) * (spins @ weights) ** 2 + B * spins.sum(axis=1)
    probabilities = softmax(energy)
    logger.debug(f"Boltzmann log partition {float(logsumexp(energy))!r}")
    return probabilities


def transition_matrix(counts: Sequence[int], atoms: Sequence[float], theta: float, B: float) -> np.ndarray:
    """One random-site heat-bath update as a 2^n x 2^n stochastic matrix."""
    spins = _check_small(counts)
    weights = np.repeat(np.asarray(atoms, dtype=float), counts)
    n = weights.size
    coupling = theta / weights.sum()
    matrix = np.zeros((2**n, 2**n))
    for state, config in enumerate(spins):
        weighted_sum = float(weights @ config)
        for i in range(n):
            rest = weighted_sum - weights[i] * config[i]
            up = flip_up_probability(rest, weights[i], coupling, B)
            # Bit i set means spin i is down.
            up_state, down_state = state & ~(1 << i), state | (1 << i)
            matrix[state, up_state] += up / n
            matrix[state, down_state] += (1.0 - up) / n
    return matrix
