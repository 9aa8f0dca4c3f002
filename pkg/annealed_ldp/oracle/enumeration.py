"""
Exact finite-n annealed Ising quantities for finite-type weight sequences.

Vertices of the same type are exchangeable, so the sum over 2^n spin
configurations collapses to a sum over the number of up-spins j_k within
each type. With u_k = 2 j_k - n_k, every edge factor e^{beta s s'} p + 1 - p
equals C e^{beta' s s'}, which turns the annealed numerator into

    prod_k binom(n_k, j_k) exp(u^T J u / 2 + h^T u)

times a constant. All sums are accumulated in log space.
"""

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln
from scipy.special import logsumexp

from annealed_ldp.core.conf import setting
from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import ResourceLimitError
from annealed_ldp.core.exceptions import WeightValidationError
from annealed_ldp.core.numerics import parallel_map
from annealed_ldp.weights.distributions import WeightModel
from annealed_ldp.weights.distributions import WeightSequence
from annealed_ldp.weights.distributions import largest_remainder_counts

logger = logging.getLogger(__name__)

MAX_SINGLED_OUT = 4
EXP_OVERFLOW = 709.0


@dataclass(frozen=True)
class TiltedEdgeParams:
    """Edge factor e^{t + beta s s'} p + 1 - p written as C e^{beta_ij_t s s'}."""

    beta_ij_t: float
    C_ij_t: float
    log_C_ij_t: float


@dataclass(frozen=True)
class ExactInstance:
    """
    A finite generalized random graph with n_k vertices of weight a_k.

    Types with a zero count are allowed and simply drop out of every sum.
    """

    counts: tuple[int, ...]
    atoms: tuple[float, ...]
    beta: float
    B: float

    def __post_init__(self):
        if len(self.counts) == 0 or len(self.counts) != len(self.atoms):
            msg = f"Need one count per atom, got {len(self.counts)} counts and {len(self.atoms)} atoms"
            raise WeightValidationError(msg)
        if any(int(c) != c or c < 0 for c in self.counts):
            msg = f"Counts must be nonnegative integers: {tuple(self.counts)}"
            raise WeightValidationError(msg)
        if sum(self.counts) < 1:
            msg = "An exact instance needs at least one vertex"
            raise WeightValidationError(msg)
        if any(a <= 0 or not math.isfinite(a) for a in self.atoms):
            msg = f"Atoms must be finite and strictly positive: {tuple(self.atoms)}"
            raise WeightValidationError(msg)
        if not math.isfinite(self.beta) or self.beta < 0:
            msg = f"Inverse temperature must be finite and nonnegative, got {self.beta!r}"
            raise DomainError(msg)
        if not math.isfinite(self.B):
            msg = f"External field must be finite, got {self.B!r}"
            raise DomainError(msg)
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "atoms", tuple(float(a) for a in self.atoms))

    @classmethod
    def from_model(cls, model: WeightModel, n: int, beta: float, B: float) -> "ExactInstance":
        """Finite-n instance whose type frequencies round n p_k by largest remainders."""
        return cls(largest_remainder_counts(model, n), model.atoms, beta, B)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    @cached_property
    def total_weight(self) -> float:
        return math.fsum(c * a for c, a in zip(self.counts, self.atoms, strict=True))

    @cached_property
    def pair_probabilities(self) -> np.ndarray:
        """K x K matrix p_kl = a_k a_l / (l_n + a_k a_l)."""
        a = np.asarray(self.atoms)
        products = np.outer(a, a)
        matrix = products / (self.total_weight + products)
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def weight_sequence(self) -> WeightSequence:
        return WeightSequence(tuple(a for a, c in zip(self.atoms, self.counts, strict=True) for _ in range(c)))


def _log_edge_factors(t, p, beta):
    """log of e^{t + beta} p + 1 - p and e^{t - beta} p + 1 - p."""
    log_p, log_q = np.log(p), np.log1p(-p)
    return np.logaddexp(t + beta + log_p, log_q), np.logaddexp(t - beta + log_p, log_q)


def tilted_edge_params(t: float, p: float, beta: float) -> TiltedEdgeParams:
    """
    Effective coupling and prefactor of a tilted edge.

    Args:
        t: Edge tilt
        p: Edge probability, in (0, 1)
        beta: Inverse temperature

    Returns:
        TiltedEdgeParams with beta_ij_t = (f+ - f-) / 2 and log C = (f+ + f-) / 2,
        f+- the log edge factors at aligned and opposed spins
    """
    if not 0.0 < p < 1.0:
        msg = f"Edge probability must lie in (0, 1), got {p!r}"
        raise DomainError(msg)
    aligned, opposed = _log_edge_factors(t, p, beta)
    log_c = 0.5 * float(aligned + opposed)
    return TiltedEdgeParams(
        beta_ij_t=0.5 * float(aligned - opposed),
        C_ij_t=math.exp(log_c) if log_c < EXP_OVERFLOW else math.inf,
        log_C_ij_t=log_c,
    )


def _pair_tables(t, p, beta) -> tuple[np.ndarray, np.ndarray]:
    aligned, opposed = _log_edge_factors(t, p, beta)
    return 0.5 * (aligned - opposed), 0.5 * (aligned + opposed)


def _check_limits(counts: Sequence[int]) -> None:
    max_vertices = int(setting("ANNEALED_LDP_EXACT_MAX_VERTICES", 5000))
    max_types = int(setting("ANNEALED_LDP_EXACT_MAX_TYPES", 4))
    max_states = int(setting("ANNEALED_LDP_EXACT_MAX_STATES", 50_000_000))
    n = sum(counts)
    states = math.prod(c + 1 for c in counts)
    if n > max_vertices or len(counts) > max_types or states > max_states:
        msg = (
            f"Exact enumeration of counts {tuple(counts)} exceeds the configured limits "
            f"(n <= {max_vertices}, K <= {max_types}, states <= {max_states})"
        )
        raise ResourceLimitError(msg)


def _log_binomials(c: int) -> np.ndarray:
    j = np.arange(c + 1)
    return gammaln(c + 1) - gammaln(j + 1) - gammaln(c - j + 1)


def _log_type_sum(counts, coupling, field, *, by_total=False):
    """
    log sum over j of prod_k binom(n_k, j_k) exp(u^T J u / 2 + h^T u).

    The first type is the outer, parallel index. With ``by_total`` the sum
    is kept separate for every total number of up-spins sum_k j_k.
    """
    head, rest = counts[0], tuple(counts[1:])
    dims = tuple(c + 1 for c in rest)
    size = math.prod(dims)
    grid = np.indices(dims).reshape(len(rest), size)
    rest_u = 2.0 * grid - np.asarray(rest, dtype=float)[:, None]

    rest_log = np.zeros(size)
    for k, c in enumerate(rest):
        rest_log += _log_binomials(c)[grid[k]]
    rest_log += 0.5 * np.einsum("km,kl,lm->m", rest_u, coupling[1:, 1:], rest_u) + field[1:] @ rest_u
    cross = coupling[0, 1:] @ rest_u
    head_log = _log_binomials(head)

    if by_total:
        up_spins = grid.sum(axis=0)
        order = np.argsort(up_spins, kind="stable")
        groups, starts = np.unique(up_spins[order], return_index=True)
        lengths = np.diff(np.append(starts, size))
        n_total = sum(counts)

    def slice_value(j1):
        u1 = 2.0 * j1 - head
        exponent = rest_log + u1 * cross + (head_log[j1] + 0.5 * coupling[0, 0] * u1 * u1 + field[0] * u1)
        if not by_total:
            return float(logsumexp(exponent))
        ordered = exponent[order]
        peaks = np.maximum.reduceat(ordered, starts)
        sums = np.add.reduceat(np.exp(ordered - np.repeat(peaks, lengths)), starts)
        out = np.full(n_total + 1, -np.inf)
        out[groups + j1] = peaks + np.log(sums)
        return out

    slices = parallel_map(slice_value, range(head + 1))
    if by_total:
        return logsumexp(np.vstack(slices), axis=0)
    return float(logsumexp(slices))


def _annealed_log_sum(counts, beta_table, log_c_table, field, *, by_total=False):
    """Annealed numerator over vertices with the given counts and pair tables."""
    n_k = np.asarray(counts, dtype=float)
    diag_c, diag_beta = np.diag(log_c_table), np.diag(beta_table)
    constant = 0.5 * (n_k @ log_c_table @ n_k) - 0.5 * float(n_k @ diag_c) - 0.5 * float(n_k @ diag_beta)
    return constant + _log_type_sum(tuple(counts), beta_table, field, by_total=by_total)


def _log_partition(inst: ExactInstance, t: float = 0.0, *, by_total=False):
    beta_table, log_c_table = _pair_tables(t, inst.pair_probabilities, inst.beta)
    field = np.full(inst.size, inst.B)
    return _annealed_log_sum(inst.counts, beta_table, log_c_table, field, by_total=by_total)


def exact_log_partition(inst: ExactInstance) -> float:
    """
    log Z^an_n, the log of sum_sigma e^{B sum sigma} prod_{i<j} (e^{beta s_i s_j} p_ij + 1 - p_ij).

    Raises:
        ResourceLimitError: when the instance exceeds the configured caps
    """
    _check_limits(inst.counts)
    value = _log_partition(inst)
    logger.debug(f"Exact log partition for counts {inst.counts}: {value!r}")
    return value


@dataclass(frozen=True)
class SpinDistribution:
    """Exact law of the total spin S_n on {-n, -n + 2, ..., n}."""

    totals: np.ndarray
    log_probabilities: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_probabilities)

    def log_probability(self, s: int) -> float:
        n = int(self.totals[-1])
        if abs(s) > n or (s + n) % 2:
            return -math.inf
        return float(self.log_probabilities[(s + n) // 2])


def exact_spin_distribution(inst: ExactInstance) -> SpinDistribution:
    _check_limits(inst.counts)
    log_weights = _log_partition(inst, by_total=True)
    log_probabilities = log_weights - logsumexp(log_weights)
    totals = 2 * np.arange(inst.n + 1) - inst.n
    return SpinDistribution(totals=totals, log_probabilities=log_probabilities)


def exact_log_edge_mgf(t: float, inst: ExactInstance) -> float:
    """log E[e^{t |E_n|}], every edge tilted by t."""
    _check_limits(inst.counts)
    if t == 0.0:
        return 0.0
    return _log_partition(inst, t) - _log_partition(inst)


def exact_edge_mgf(t: float, inst: ExactInstance) -> float:
    value = exact_log_edge_mgf(t, inst)
    return math.exp(value) if value < EXP_OVERFLOW else math.inf


def _log_singled_out(ss: Sequence[float], vertex_types: Sequence[int], inst: ExactInstance) -> float:
    """
    Annealed numerator with m singled-out vertices whose incident edges are tilted.

    A pair of singled-out vertices i, i' carries tilt s_i + s_i'; a pair of a
    singled-out vertex and an ordinary one carries s_i. The singled-out spins
    are summed explicitly and act as an extra field on the remaining types.
    """
    rest = list(inst.counts)
    for k in vertex_types:
        if not 0 <= k < inst.size:
            msg = f"Vertex type {k!r} out of range for {inst.size} types"
            raise DomainError(msg)
        rest[k] -= 1
        if rest[k] < 0:
            msg = f"Not enough vertices of type {k} to single out, counts {inst.counts}"
            raise DomainError(msg)

    p, beta = inst.pair_probabilities, inst.beta
    rest_n = np.asarray(rest, dtype=float)
    beta_table, log_c_table = _pair_tables(0.0, p, beta)
    incident = [_pair_tables(s, p[k], beta) for s, k in zip(ss, vertex_types, strict=True)]
    m = len(ss)
    among = {
        (i, j): tilted_edge_params(ss[i] + ss[j], float(p[vertex_types[i], vertex_types[j]]), beta)
        for i, j in itertools.combinations(range(m), 2)
    }

    terms = []
    for spins in itertools.product((1.0, -1.0), repeat=m):
        field = np.full(inst.size, inst.B)
        constant = inst.B * sum(spins)
        for sigma, (beta_row, log_c_row) in zip(spins, incident, strict=True):
            field = field + sigma * beta_row
            constant += float(rest_n @ log_c_row)
        for (i, j), params in among.items():
            constant += params.log_C_ij_t + params.beta_ij_t * spins[i] * spins[j]
        terms.append(constant + _annealed_log_sum(tuple(rest), beta_table, log_c_table, field))
    return float(logsumexp(terms))


def exact_joint_degree_mgf(ss: Sequence[float], vertex_types: Sequence[int], inst: ExactInstance) -> float:
    """
    E[exp(sum_i s_i D_i)] for up to four singled-out vertices of the given types.

    Args:
        ss: Tilts, one per vertex
        vertex_types: Type index of each singled-out vertex
        inst: The finite instance

    Returns:
        The joint moment generating function of their degrees
    """
    if len(ss) != len(vertex_types) or not 1 <= len(ss) <= MAX_SINGLED_OUT:
        msg = f"Need 1 to {MAX_SINGLED_OUT} matching tilts and vertex types, got {len(ss)} and {len(vertex_types)}"
        raise DomainError(msg)
    _check_limits(inst.counts)
    if all(s == 0.0 for s in ss):
        return 1.0
    value = _log_singled_out(ss, vertex_types, inst) - _log_singled_out([0.0] * len(ss), vertex_types, inst)
    return math.exp(value) if value < EXP_OVERFLOW else math.inf


def exact_degree_mgf(s: float, vertex_type: int, inst: ExactInstance) -> float:
    """E[e^{s D}] for one vertex of the given type."""
    return exact_joint_degree_mgf([s], [vertex_type], inst)


def _icw_log_sum(inst: ExactInstance, theta: float | None, *, by_total=False):
    _check_limits(inst.counts)
    theta = math.sinh(inst.beta) if theta is None else theta
    if not math.isfinite(theta) or theta < 0:
        msg = f"Coupling must be finite and nonnegative, got {theta!r}"
        raise DomainError(msg)
    a = np.asarray(inst.atoms)
    coupling = theta / inst.total_weight * np.outer(a, a)
    return _log_type_sum(inst.counts, coupling, np.full(inst.size, inst.B), by_total=by_total)


def exact_icw_log_partition(inst: ExactInstance, theta: float | None = None) -> float:
    """
    log of sum_sigma exp(theta / (2 l_n) (sum_i w_i s_i)^2 + B sum_i s_i).

    ``theta`` defaults to sinh(beta).
    """
    return _icw_log_sum(inst, theta)


def exact_icw_spin_distribution(inst: ExactInstance, theta: float | None = None) -> SpinDistribution:
    """Law of S_n under the finite inhomogeneous Curie-Weiss measure."""
    log_weights = _icw_log_sum(inst, theta, by_total=True)
    totals = 2 * np.arange(inst.n + 1) - inst.n
    return SpinDistribution(totals=totals, log_probabilities=log_weights - logsumexp(log_weights))


def multihypergeometric_conditional(q_counts: Sequence[int], inst: ExactInstance, m_plus: int) -> float:
    """
    P(q_k up-spins in type k | m_plus up-spins in total) under exchangeability.

    Violated constraints give probability zero, not an error.
    """
    if len(q_counts) != inst.size:
        msg = f"Need {inst.size} per-type counts, got {len(q_counts)}"
        raise DomainError(msg)
    if sum(q_counts) != m_plus or not 0 <= m_plus <= inst.n:
        return 0.0
    if any(q < 0 or q > c for q, c in zip(q_counts, inst.counts, strict=True)):
        return 0.0
    log_numerator = math.fsum(float(_log_binomials(c)[q]) for q, c in zip(q_counts, inst.counts, strict=True))
    return math.exp(log_numerator - float(_log_binomials(inst.n)[m_plus]))


def nearest_admissible_total(m: float, n: int) -> int:
    """floor(m n), moved up by one when its parity differs from n's."""
    if not -1.0 <= m <= 1.0:
        msg = f"Magnetization must lie in [-1, 1], got {m!r}"
        raise DomainError(msg)
    s = math.floor(m * n)
    if (s - n) % 2:
        s += 1
    return max(-n, min(n, s))
