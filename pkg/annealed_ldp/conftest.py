import pytest

from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.weights.distributions import WeightModel
from annealed_ldp.weights.distributions import make_finite_type


@pytest.fixture
def two_type() -> WeightModel:
    return make_finite_type((1.0, 3.0), (0.5, 0.5))


@pytest.fixture
def single_type() -> WeightModel:
    return make_finite_type((1.0,), (1.0,))


@pytest.fixture
def three_type() -> WeightModel:
    return make_finite_type((1.0, 2.0, 4.0), (0.25, 0.5, 0.25))


@pytest.fixture
def low_temperature_point(two_type) -> ModelPoint:
    return ModelPoint(beta=0.8, B=0.0, model=two_type)


@pytest.fixture
def reference_point(two_type) -> ModelPoint:
    return ModelPoint(beta=0.8, B=0.1, model=two_type)
