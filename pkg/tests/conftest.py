import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def leaf_arrays(min_res=1, max_res=5, elements=finite):
    return st.integers(min_res, max_res).flatmap(lambda N: arrays(np.float64, 1 << N, elements=elements))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
