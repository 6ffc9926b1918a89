import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import mirrorfield as mf


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid():
    return mf.make_grid(256, 0.25)


@pytest.fixture
def big_grid():
    return mf.make_grid(1024, 0.25)


def random_field(grid, rng, representation="momentum", kernel=None, zero_band_edge=True):
    field = mf.zero_field(grid, representation=representation, kernel=kernel)
    field.data[:] = rng.standard_normal(field.data.shape) + 1j * rng.standard_normal(
        field.data.shape
    )
    if zero_band_edge and representation == "momentum":
        field.data[..., 0] = 0.0
    return field
