import math
from dataclasses import replace

import numpy as np
import pytest

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.core.exceptions import WeightValidationError
from annealed_ldp.mc.glauber import McConfig
from annealed_ldp.mc.glauber import boltzmann_distribution
from annealed_ldp.mc.glauber import flip_up_probability
from annealed_ldp.mc.glauber import glauber_run
from annealed_ldp.mc.glauber import transition_matrix
from annealed_ldp.oracle.brute_force import all_spin_configurations
from annealed_ldp.oracle.enumeration import ExactInstance
from annealed_ldp.oracle.enumeration import exact_icw_spin_distribution
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import magnetization

SMALL = {"counts": (1, 2), "atoms": (1.0, 3.0)}


def free_config(**overrides) -> McConfig:
    base = McConfig(counts=(500, 500), atoms=(1.0, 3.0), theta=0.0, B=0.0, sweeps=4000, burn_in=100, seed=2024)
    return replace(base, **overrides)


def finite_icw_magnetization(counts, atoms, beta, B) -> float:
    dist = exact_icw_spin_distribution(ExactInstance(counts, atoms, beta, B))
    return float(dist.probabilities @ dist.totals) / sum(counts)


def test_config_validation():
    with pytest.raises(WeightValidationError):
        free_config(counts=(0, 0))
    with pytest.raises(WeightValidationError):
        free_config(counts=(5,))
    with pytest.raises(DomainError):
        free_config(sweeps=100, burn_in=100)
    with pytest.raises(DomainError):
        free_config(thin=0)
    with pytest.raises(DomainError):
        free_config(theta=-0.1)
    with pytest.raises(DomainError):
        free_config(seed=-1)


def test_config_survives_serialization():
    config = free_config(B=0.3, thin=2)
    assert McConfig.from_dict(config.to_dict()) == config


def test_free_spins_are_centered():
    result = glauber_run(free_config())
    assert result.std_error > 0
    assert abs(result.mean_magnetization) <= 4 * result.std_error
    assert result.samples_used == 3900
    assert result.rng == "Philox"
    assert result.seed_echo == 2024


def test_free_spins_follow_the_field():
    result = glauber_run(free_config(B=0.5))
    assert abs(result.mean_magnetization - math.tanh(0.5)) <= 4 * result.std_error
    assert abs(result.mean_weighted_magnetization - math.tanh(0.5)) <= 4 * result.weighted_std_error


def test_runs_are_reproducible():
    config = free_config(theta=0.5, B=0.1, sweeps=500, burn_in=50)
    first, second = glauber_run(config), glauber_run(config)
    assert first == second
    np.testing.assert_array_equal(first.magnetizations, second.magnetizations)
    other = glauber_run(replace(config, seed=7))
    assert other.mean_magnetization != first.mean_magnetization


def test_thinning_and_drift():
    result = glauber_run(free_config(theta=1.2, B=-0.2, sweeps=1000, burn_in=100, thin=3))
    assert result.samples_used == 300
    assert result.weighted_sum_drift <= 1e-9
    assert result.mean_magnetization < 0


def test_batches_setting(settings):
    settings.ANNEALED_LDP_MC_BATCHES = 1
    result = glauber_run(free_config(sweeps=200, burn_in=10))
    assert result.std_error == 0.0


def test_flip_probability_matches_boltzmann_ratio():
    weights = np.array([1.0, 3.0, 3.0])
    theta, B = math.sinh(0.8), 0.2
    probabilities = boltzmann_distribution((1, 2), (1.0, 3.0), theta, B)
    spins = all_spin_configurations(3)
    # States 0 and 1 differ only in the spin of vertex 0.
    assert spins[0].tolist() == [1, 1, 1] and spins[1].tolist() == [-1, 1, 1]
    up = flip_up_probability(6.0, weights[0], theta / weights.sum(), B)
    assert up / (1 - up) == pytest.approx(probabilities[0] / probabilities[1], rel=1e-13)


@pytest.mark.parametrize(("theta", "B"), [(math.sinh(0.8), 0.2), (0.0, 0.0), (2.0, -0.7)])
def test_heat_bath_is_reversible(theta, B):
    matrix = transition_matrix(SMALL["counts"], SMALL["atoms"], theta, B)
    pi = boltzmann_distribution(SMALL["counts"], SMALL["atoms"], theta, B)
    np.testing.assert_allclose(matrix.sum(axis=1), 1.0, atol=1e-15)
    flows = pi[:, None] * matrix
    np.testing.assert_allclose(flows, flows.T, atol=1e-15)

    stationary = np.linalg.matrix_power(matrix, 4096)[0]
    assert 0.5 * np.abs(stationary - pi).sum() <= 1e-10


def test_exact_kernels_are_small_only():
    with pytest.raises(DomainError):
        transition_matrix((10, 10), (1.0, 3.0), 0.5, 0.0)


def test_ferromagnetic_run_matches_finite_icw():
    counts, atoms = (200, 200), (1.0, 3.0)
    config = McConfig(counts, atoms, theta=math.sinh(0.8), B=0.2, sweeps=6000, burn_in=200, seed=11)
    result = glauber_run(config)
    expected = finite_icw_magnetization(counts, atoms, 0.8, 0.2)
    assert abs(result.mean_magnetization - expected) <= 4 * result.std_error


@pytest.mark.slow
def test_large_run_matches_limit(two_type):
    counts, atoms = (1000, 1000), (1.0, 3.0)
    config = McConfig(counts, atoms, theta=math.sinh(0.8), B=0.2, sweeps=100_000, burn_in=1000, seed=20240817)
    result = glauber_run(config)
    finite = finite_icw_magnetization(counts, atoms, 0.8, 0.2)
    limit = magnetization(ModelPoint(beta=0.8, B=0.2, model=two_type))
    assert abs(result.mean_magnetization - finite) <= 3 * result.std_error
    assert abs(result.mean_magnetization - limit) <= 3 * result.std_error + 2e-3
