"""
Direct enumeration of all 2^n spin configurations, for checking the type
reduction on small graphs.
"""

import math
from collections.abc import Sequence

import numpy as np
from scipy.special import logsumexp

from annealed_ldp.core.conf import setting
from annealed_ldp.core.exceptions import ResourceLimitError
from annealed_ldp.weights.distributions import WeightSequence


def all_spin_configurations(n: int) -> np.ndarray:
    """2^n x n array of +-1 spins, row r holding the binary digits of r."""
    bits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    return 1 - 2 * bits


def brute_force_log_partition(
    weights: WeightSequence,
    beta: float,
    B: float,
    *,
    t: float | np.ndarray = 0.0,
) -> float:
    """
    log of sum_sigma e^{B sum sigma} prod_{i<j} (e^{t_ij + beta s_i s_j} p_ij + 1 - p_ij).

    ``t`` is a common edge tilt or an n x n matrix of per-pair tilts; with
    a tilt the sum becomes the numerator of an edge generating function.
    """
    n = len(weights)
    max_vertices = int(setting("ANNEALED_LDP_BRUTE_FORCE_MAX_VERTICES", 16))
    if n > max_vertices:
        msg = f"Brute force over 2^{n} configurations exceeds the limit of {max_vertices} vertices"
        raise ResourceLimitError(msg)

    spins = all_spin_configurations(n)
    upper_i, upper_j = np.triu_indices(n, k=1)
    pair_p = weights.edge_probabilities()[upper_i, upper_j]
    pair_t = np.asarray(t, dtype=float)[upper_i, upper_j] if np.ndim(t) == 2 else float(t)
    products = spins[:, upper_i] * spins[:, upper_j]
    edge_terms = np.logaddexp(pair_t + beta * products + np.log(pair_p), np.log1p(-pair_p))
    log_weights = B * spins.sum(axis=1) + edge_terms.sum(axis=1)
    return float(logsumexp(log_weights))


def brute_force_log_edge_mgf(t: float, weights: WeightSequence, beta: float, B: float) -> float:
    if t == 0.0:
        return 0.0
    return brute_force_log_partition(weights, beta, B, t=t) - brute_force_log_partition(weights, beta, B)


def brute_force_log_degree_mgf(
    ss: Sequence[float],
    vertices: Sequence[int],
    weights: WeightSequence,
    beta: float,
    B: float,
) -> float:
    """log E[exp(sum_i s_i D_{v_i})]; the edge between v_i and v_j carries s_i + s_j."""
    tilt = np.zeros(len(weights))
    tilt[list(vertices)] = ss
    tilts = tilt[:, None] + tilt[None, :]
    return brute_force_log_partition(weights, beta, B, t=tilts) - brute_force_log_partition(weights, beta, B)


def log_two_cosh(B: float) -> float:
    """log(2 cosh B), the one-vertex partition function."""
    return abs(B) + math.log1p(math.exp(-2.0 * abs(B)))
