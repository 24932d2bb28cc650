import numpy as np
import pytest

from revbessel import lg_coeffs
from revbessel.params import ProblemParams


@pytest.fixture(scope="session")
def params20():
    return ProblemParams(20, 1.2)


@pytest.fixture(scope="session")
def params20a5():
    return ProblemParams(20, 5)


@pytest.fixture(scope="session")
def tables8():
    # building all eight orders takes a moment, share one instance
    return lg_coeffs.cached_tables(8)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
