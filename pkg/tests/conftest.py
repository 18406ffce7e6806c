import numpy as np
import pytest

from thzlink.spectro import Medium, bundled_linelist

H2O = 1
O2 = 7

# composition of the path-gain figure: 298.15 K, 1 atm, 50% RH
FIGURE_SPECIES = (
    (22, 0, 0.765450),
    (O2, 0, 0.20946),
    (H2O, 0, 0.0157),
    (6, 0, 0.00906),
    (2, 0, 0.00033),
)


@pytest.fixture(scope="session")
def db():
    return bundled_linelist()


@pytest.fixture(scope="session")
def figure_medium():
    return Medium(temperature=298.15, pressure=1.0, species=FIGURE_SPECIES)


@pytest.fixture(scope="session")
def empty_medium():
    return Medium(temperature=296.0, pressure=1.0, species=())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
