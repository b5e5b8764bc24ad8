import numpy as np
import pytest

from hamspec.problem import build_problem


@pytest.fixture(scope="session")
def small_problem():
    """Kink on [-20, 20] with h = 0.2: cheap but fully featured."""
    return build_problem(half_length=20.0, n_points=201)


@pytest.fixture(scope="session")
def default_problem():
    return build_problem()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
