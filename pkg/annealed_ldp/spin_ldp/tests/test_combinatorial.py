import math

import numpy as np
import pytest
from scipy.special import expit
from scipy.special import logit

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.legendre.entropy import entropy_rate
from annealed_ldp.spin_ldp.combinatorial import combinatorial_entropy
from annealed_ldp.spin_ldp.combinatorial import combinatorial_spin_rate
from annealed_ldp.spin_ldp.combinatorial import solve_lambda
from annealed_ldp.spin_ldp.combinatorial import up_weight_interval
from annealed_ldp.spin_ldp.rates import spin_rate
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import magnetization

QUICK_M_GRID = [-0.9, -0.4, 0.0, 0.5, 0.9]
FULL_M_GRID = [round(0.1 * k, 1) for k in range(-9, 10)]


def interior_grid(model):
    for m in (-0.7, -0.2, 0.0, 0.3, 0.8):
        lo, hi = up_weight_interval(m, model)
        for fraction in (0.1, 0.5, 0.9):
            yield m, lo + fraction * (hi - lo)


def test_symmetric_point_has_zero_multipliers(two_type):
    pair = solve_lambda(0.0, two_type.mean / 2, two_type)
    assert pair.lambda1 == pytest.approx(0.0, abs=1e-12)
    assert pair.lambda2 == pytest.approx(0.0, abs=1e-12)
    assert combinatorial_entropy(0.0, two_type.mean / 2, two_type) == pytest.approx(-math.log(2), abs=1e-14)


def test_single_type_gauge(single_type):
    pair = solve_lambda(0.4, 0.7, single_type)
    assert pair.lambda1 == 0.0
    assert pair.lambda2 == pytest.approx(logit(0.7), abs=1e-14)
    with pytest.raises(DomainError):
        solve_lambda(0.4, 0.6, single_type)


def test_multipliers_match_legendre_duals(two_type):
    m, x = 0.3, 1.1
    pair = solve_lambda(m, x, two_type)
    assert max(pair.residuals) <= 1e-10
    duals = entropy_rate(m, 2 * x - two_type.mean, two_type).duals
    assert pair.lambda1 == pytest.approx(2 * duals[1], abs=1e-8)
    assert pair.lambda2 == pytest.approx(2 * duals[0], abs=1e-8)


def test_residuals_across_grid(two_type, three_type):
    for model in (two_type, three_type):
        atoms, probs = model.support
        for m, x in interior_grid(model):
            pair = solve_lambda(m, x, model)
            u = expit(pair.lambda1 * atoms + pair.lambda2)
            assert abs(probs @ u - 0.5 * (1 + m)) <= 1e-10
            assert abs(probs @ (atoms * u) - x) <= 1e-10


@pytest.mark.parametrize(("m", "x"), [(0.0, 0.5), (0.0, 1.5), (0.6, 0.3), (1.0, 1.0)])
def test_outside_attainable_interval(two_type, m, x):
    with pytest.raises(DomainError):
        solve_lambda(m, x, two_type)


def test_entropy_identity(two_type, three_type):
    for model in (two_type, three_type):
        for m, x in interior_grid(model):
            expected = entropy_rate(m, 2 * x - model.mean, model).value - math.log(2)
            assert combinatorial_entropy(m, x, model) == pytest.approx(expected, abs=1e-8)


def test_combinatorial_rate_vanishes_at_magnetization(reference_point):
    result = combinatorial_spin_rate(magnetization(reference_point), reference_point)
    assert result.value <= 1e-6


def test_combinatorial_rate_outside_interval(reference_point):
    assert math.isinf(combinatorial_spin_rate(1.0, reference_point).value)


def test_combinatorial_rate_single_type(single_type):
    point = ModelPoint(beta=0.0, B=0.0, model=single_type)
    assert combinatorial_spin_rate(0.5, point).value == pytest.approx(0.1308123, abs=1e-7)


@pytest.mark.parametrize("beta", [0.2, 0.8])
@pytest.mark.parametrize("B", [0.0, 0.3])
def test_combinatorial_equals_contraction(two_type, beta, B):
    point = ModelPoint(beta=beta, B=B, model=two_type)
    for m in QUICK_M_GRID:
        combinatorial = combinatorial_spin_rate(m, point)
        contraction = spin_rate(m, point)
        assert combinatorial.value == pytest.approx(contraction.value, abs=1e-6)
        # At B = 0 the two wells are mirror images, so compare magnitudes.
        weighted = 2 * combinatorial.location[1] - two_type.mean
        assert abs(weighted) == pytest.approx(abs(contraction.location[1]), abs=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.2, 0.8])
@pytest.mark.parametrize("B", [0.0, 0.3])
def test_combinatorial_equals_contraction_full_grid(two_type, beta, B):
    point = ModelPoint(beta=beta, B=B, model=two_type)
    values = np.array([combinatorial_spin_rate(m, point).value for m in FULL_M_GRID])
    expected = np.array([spin_rate(m, point).value for m in FULL_M_GRID])
    assert np.max(np.abs(values - expected)) <= 1e-6
