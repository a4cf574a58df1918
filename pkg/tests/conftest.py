import pytest

from rmspace.quadrature import build_grid


@pytest.fixture(scope="session")
def grid():
    return build_grid()


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(64, 10, 6)
