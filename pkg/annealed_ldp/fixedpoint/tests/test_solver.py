import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from annealed_ldp.core.exceptions import DomainError
from annealed_ldp.fixedpoint.solver import Branch
from annealed_ldp.fixedpoint.solver import fixed_point_map
from annealed_ldp.fixedpoint.solver import solve_z_star
from annealed_ldp.fixedpoint.solver import solve_z_star_zero_field
from annealed_ldp.weights.distributions import make_finite_type

THETAS = [round(0.1 * k, 1) for k in range(31)]
FIELDS = [-1.0, -0.1, 0.0, 0.1, 1.0]
TWO_TYPE = make_finite_type((1.0, 3.0), (0.5, 0.5))


def damped_picard(theta, B, model, damping=0.5, tol=1e-15):
    z = math.sqrt(theta * model.mean)
    for _ in range(100_000):
        new = (1 - damping) * z + damping * fixed_point_map(z, theta, B, model)
        if abs(new - z) < tol:
            return new
        z = new
    return z


def plain_bisection(func, lo, hi, tol=1e-13):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if func(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_zero_coupling_gives_zero(two_type):
    for B in FIELDS:
        result = solve_z_star(0.0, B, two_type)
        assert result.z_star == 0.0
        assert result.branch == Branch.ZERO


def test_negative_coupling_rejected(two_type):
    with pytest.raises(DomainError):
        solve_z_star(-0.1, 0.1, two_type)
    with pytest.raises(DomainError):
        solve_z_star_zero_field(-0.1, two_type)


def test_subcritical_zero_field(two_type):
    theta = math.sinh(0.2)
    assert theta * two_type.second_moment / two_type.mean < 1
    result = solve_z_star(theta, 0.0, two_type)
    assert result.z_star == 0.0
    assert result.branch == Branch.ZERO


def test_positive_field_matches_damped_iteration(two_type):
    theta = math.sinh(0.8)
    result = solve_z_star(theta, 0.1, two_type)
    assert result.z_star > 0
    assert result.branch == Branch.SIGNED
    assert result.z_star == pytest.approx(damped_picard(theta, 0.1, two_type), abs=1e-12)


@pytest.mark.parametrize("model_name", ["two_type", "single_type"])
def test_residual_grid(model_name, request):
    model = request.getfixturevalue(model_name)
    for theta in THETAS:
        for B in FIELDS:
            result = solve_z_star(theta, B, model)
            assert result.residual <= 1e-12 * max(1.0, abs(result.z_star))
            if result.branch == Branch.SIGNED:
                assert np.sign(result.z_star) == np.sign(B)


@pytest.mark.parametrize("theta", THETAS)
def test_antisymmetry(two_type, theta):
    for B in (0.1, 1.0, 0.37):
        plus = solve_z_star(theta, B, two_type)
        minus = solve_z_star(theta, -B, two_type)
        assert minus.z_star == pytest.approx(-plus.z_star, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.01, max_value=2.0))
def test_monotone_in_coupling(theta):
    model = TWO_TYPE
    lower = solve_z_star(theta, 0.2, model).z_star
    upper = solve_z_star(theta * 1.05, 0.2, model).z_star
    assert upper >= lower - 1e-12


def test_zero_field_slope_below_one(two_type):
    theta = 0.9 * two_type.mean / two_type.second_moment
    assert solve_z_star_zero_field(theta, two_type).z_star == 0.0


def test_zero_field_single_type_matches_bisection(single_type):
    result = solve_z_star_zero_field(2.0, single_type)
    root2 = math.sqrt(2.0)
    expected = plain_bisection(lambda z: root2 * math.tanh(root2 * z) - z, 1e-3, root2)
    assert result.branch == Branch.LARGEST_POSITIVE
    assert result.z_star == pytest.approx(expected, abs=1e-12)


def test_zero_field_at_critical_coupling(two_type):
    theta = math.sinh(math.asinh(0.4))
    assert solve_z_star_zero_field(theta, two_type).z_star == 0.0


@pytest.mark.parametrize("theta", [0.6, 0.8, 1.0, 2.0, 3.0])
def test_zero_field_matches_small_field_limit(two_type, theta):
    zero = solve_z_star_zero_field(theta, two_type).z_star
    small = solve_z_star(theta, 1e-6, two_type).z_star
    assert zero > 0
    assert abs(zero - small) <= 1e-4


def test_huge_coupling_saturates(two_type):
    theta = math.exp(40.0)
    result = solve_z_star(theta, 0.1, two_type)
    assert result.z_star == pytest.approx(math.sqrt(theta * two_type.mean), rel=1e-12)


def test_branch_labels_are_plain_strings():
    result = solve_z_star_zero_field(2.0, TWO_TYPE)
    assert result.branch == "largest_positive"
    assert str(result.branch) == Branch.LARGEST_POSITIVE.value


def test_solvers_import_without_the_orm():
    modules = ["annealed_ldp.fixedpoint.solver", "annealed_ldp.spin_ldp.rates", "annealed_ldp.spin_ldp.curves"]
    script = "import importlib, sys\n" + "".join(f"importlib.import_module({name!r})\n" for name in modules)
    script += "assert 'django.db' not in sys.modules, sorted(m for m in sys.modules if m.startswith('django'))\n"
    env = {key: value for key, value in os.environ.items() if key != "DJANGO_SETTINGS_MODULE"}
    command = [sys.executable, "-c", script]
    root = Path(__file__).resolve().parents[3]
    completed = subprocess.run(command, cwd=root, env=env, capture_output=True, text=True, check=False)  # noqa: S603
    assert completed.returncode == 0, completed.stderr
