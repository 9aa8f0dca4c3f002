import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from annealed_ldp.core.conf import setting
from annealed_ldp.core.conf import worker_count
from annealed_ldp.core.exceptions import AnnealedLDPError
from annealed_ldp.core.exceptions import SolverError
from annealed_ldp.core.numerics import expand_bracket
from annealed_ldp.core.numerics import log_cosh
from annealed_ldp.core.numerics import monotone_root
from annealed_ldp.core.numerics import parallel_map


@given(st.floats(min_value=-30.0, max_value=30.0))
def test_log_cosh_matches_direct_formula(u):
    assert log_cosh(u) == pytest.approx(math.log(math.cosh(u)), abs=1e-12)


def test_log_cosh_does_not_overflow():
    values = log_cosh(np.array([-1e4, 0.0, 1e4]))
    np.testing.assert_allclose(values, [1e4 - math.log(2), 0.0, 1e4 - math.log(2)], rtol=1e-15)


def test_bracket_and_root():
    bracket = expand_bracket(math.tanh, 0.999)
    assert bracket is not None
    lo, hi = bracket
    assert math.tanh(lo) <= 0.999 <= math.tanh(hi)
    assert monotone_root(math.tanh, 0.999, bracket) == pytest.approx(math.atanh(0.999), abs=1e-14)


def test_bracket_gives_up_at_limit():
    assert expand_bracket(math.tanh, 2.0, limit=64.0) is None


def test_failed_root_carries_diagnostics():
    with pytest.raises(SolverError) as info:
        monotone_root(math.tanh, 2.0, (-1.0, 1.0))
    assert isinstance(info.value, AnnealedLDPError)
    assert info.value.diagnostics["bracket"] == (-1.0, 1.0)


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(50), workers=4) == [x * x for x in range(50)]
    assert parallel_map(str, [], workers=4) == []


def test_worker_count_reads_settings(settings):
    settings.ANNEALED_LDP_THREADS = 3
    assert worker_count() == 3
    settings.ANNEALED_LDP_THREADS = 0
    assert worker_count() == 1
    assert setting("ANNEALED_LDP_NOT_A_SETTING", 42) == 42
