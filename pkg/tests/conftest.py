import numpy as np
import pytest

from kreinlab.interval1d import unit_problem


@pytest.fixture(scope="session")
def unit():
    return unit_problem()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
