import math

import pytest

from annealed_ldp.spin_ldp.curves import RateMethod
from annealed_ldp.spin_ldp.curves import spin_rate_curve
from annealed_ldp.spin_ldp.rates import spin_rate
from annealed_ldp.thermo.services import magnetization

GRID = [-0.6, -0.2, 0.0, 0.2, 0.6]


def test_contraction_curve_keeps_grid_order(reference_point):
    curve = spin_rate_curve(GRID, reference_point, RateMethod.CONTRACTION)
    assert curve.grid == tuple(GRID)
    assert curve.method == "contraction"
    for m, value in zip(curve.grid, curve.values, strict=True):
        assert value == spin_rate(m, reference_point).value
    assert min(curve.values) >= -1e-10


def test_curve_minimum_near_magnetization(reference_point):
    m_an = magnetization(reference_point)
    grid = [m_an - 0.1, m_an, m_an + 0.1]
    curve = spin_rate_curve(grid, reference_point)
    assert curve.values[1] <= 1e-6
    assert curve.values[1] == min(curve.values)


def test_threaded_curve_matches_sequential(reference_point, settings):
    sequential = spin_rate_curve(GRID, reference_point)
    settings.ANNEALED_LDP_THREADS = 3
    threaded = spin_rate_curve(GRID, reference_point)
    assert threaded == sequential


def test_legendre_curve_flags_flat_piece(low_temperature_point):
    # m+ is about 0.82 at beta = 0.8 for this model.
    curve = spin_rate_curve([-0.95, 0.0, 0.95], low_temperature_point, RateMethod.HIGHT_LEGENDRE)
    assert curve.non_exposed == (False, True, False)
    assert all(math.isnan(x) for x in curve.minimizers)


def test_combinatorial_curve_reports_weighted_minimizers(reference_point):
    contraction = spin_rate_curve([0.2], reference_point, RateMethod.CONTRACTION)
    combinatorial = spin_rate_curve([0.2], reference_point, RateMethod.COMBINATORIAL)
    assert combinatorial.values[0] == pytest.approx(contraction.values[0], abs=1e-6)
    assert combinatorial.minimizers[0] == pytest.approx(contraction.minimizers[0], abs=1e-3)


def test_unknown_method(reference_point):
    with pytest.raises(ValueError, match="Unknown rate method"):
        spin_rate_curve(GRID, reference_point, "saddle_point")
