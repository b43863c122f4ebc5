import numpy as np
import pytest
from hypothesis import strategies as st

from steersim.mimo import sample_rayleigh


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rayleigh(seed, n_r=2, n_t=2):
    return sample_rayleigh(np.random.default_rng(seed), n_r, n_t)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
