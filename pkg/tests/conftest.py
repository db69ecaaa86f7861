import pytest

from clusterkit.potentials import PairPotential


@pytest.fixture(scope="session")
def rod():
    return PairPotential("hard_rod", 1.0, 1)


@pytest.fixture(scope="session")
def sphere():
    return PairPotential("hard_sphere", 1.0, 3)


@pytest.fixture(scope="session")
def well():
    return PairPotential("square_well", 1.0, 1, epsilon=1.0, lambda_w=1.5, B=1.0)
