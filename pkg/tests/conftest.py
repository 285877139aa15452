import numpy as np
import pytest

from dieres.multipole import ball_quadrature, sphere_quadrature


@pytest.fixture(scope="session")
def sphere_quad():
    return sphere_quadrature(64, 128)


@pytest.fixture(scope="session")
def sphere_quad_small():
    return sphere_quadrature(24, 48)


@pytest.fixture(scope="session")
def ball_quad():
    return ball_quadrature(32, 64, 128)


@pytest.fixture(scope="session")
def ball_quad_small():
    return ball_quadrature(20, 28, 56)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240117)
