import numpy as np
import pytest

from compressed_modes.cpwbuilder import build_bcpw_set
from compressed_modes.lattice import build_grid


@pytest.fixture(scope="session")
def small_bcpw():
    """Three levels on a short ring; cheap enough for unit tests."""
    return build_bcpw_set(build_grid(40.0, 128), mu=5.0, w=5.0, levels=3)


@pytest.fixture(scope="session")
def full_bcpw():
    """Six levels at L=100, n=512, w=5, mu=5 (the gallery parameters)."""
    return build_bcpw_set(build_grid(100.0, 512), mu=5.0, w=5.0, levels=6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
