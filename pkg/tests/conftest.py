import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pentabird.polygon import random_convex_ngon

settings.register_profile(
    "default", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**31 - 1)


@st.composite
def convex_polygons(draw, n_min=5, n_max=16):
    n = draw(st.integers(n_min, n_max))
    return random_convex_ngon(n, seed=draw(seeds))


@st.composite
def nice_pairs(draw, n_max=16):
    """(P, k) with P a random convex n-gon and n > 3k."""
    k = draw(st.integers(1, 4))
    n = draw(st.integers(3 * k + 2 if k == 1 else 3 * k + 1, max(n_max, 3 * k + 2)))
    return random_convex_ngon(n, seed=draw(seeds)), k


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
