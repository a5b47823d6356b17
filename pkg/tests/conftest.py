import numpy as np
import pytest

from fractax.model import make_grid


@pytest.fixture
def grid1d():
    return make_grid(1)


@pytest.fixture
def grid1d_small():
    return make_grid(1, points=128)


@pytest.fixture
def grid2d():
    return make_grid(2, points=32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
