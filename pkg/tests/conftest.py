import numpy as np
import pytest

from gaussfid import random_state
from gaussfid.states import random_symplectic


def mixed_pair(n, seed, **kwargs):
    """Two independent random mixed states on n modes."""
    return random_state(n, seed, **kwargs), random_state(n, seed + 7919, **kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_symplectic_factory():
    def factory(n, seed, max_squeeze=1.0):
        return random_symplectic(n, np.random.default_rng(seed), max_squeeze)
    return factory
