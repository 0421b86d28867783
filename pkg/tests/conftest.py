import numpy as np
import pytest

from emhd.grid import Grid
from emhd.solver import random_shell_field


@pytest.fixture(scope="session")
def grid16():
    return Grid(16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(32)


@pytest.fixture(scope="session")
def grid64():
    return Grid(64)


def random_field(grid, q_lo=1, q_hi=3, seed=0):
    """Divergence-free band-limited test field, unit energy."""
    return random_shell_field(grid, q_lo, q_hi, seed)


def random_scalar(grid, k_max=4, seed=0):
    """Band-limited random scalar with |k_i| <= k_max."""
    rng = np.random.default_rng(seed)
    from emhd.grid import from_physical

    f = from_physical(grid, rng.standard_normal((1, grid.n, grid.n, grid.n)))
    k = np.abs(grid.wavenumbers)
    keep = (
        (k[:, None, None] <= k_max)
        & (k[None, :, None] <= k_max)
        & (k[None, None, :] <= k_max)
    )
    return f.with_coeffs(f.coeffs * keep)
