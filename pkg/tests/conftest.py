import random

import pytest

from jetcomplex.cauchyfueter import cf_system
from jetcomplex.jets import PDESystem


@pytest.fixture(scope="session")
def cf():
    return cf_system()


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def gradient():
    # u1 = df/dx1, u2 = df/dx2 written as the first-order operator f -> (df/dx1, df/dx2)
    return PDESystem.from_terms(1, 2, [[(0, 0, 1)], [(0, 1, 1)]], unknown_names=("f",))


@pytest.fixture(scope="session")
def curl():
    return PDESystem.from_terms(2, 2, [[(1, 0, 1), (0, 1, -1)]])
