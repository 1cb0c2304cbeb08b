import numpy as np
import pytest

from pathtransport.catalog import standard_catalog


@pytest.fixture(scope="session")
def catalog():
    return standard_catalog()


@pytest.fixture(scope="session")
def flat_entry(catalog):
    return catalog["flat"]


@pytest.fixture(scope="session")
def sphere_entry(catalog):
    return catalog["sphere"]


@pytest.fixture(scope="session")
def ortho_entry(catalog):
    return catalog["sphere-orthonormal"]


@pytest.fixture(scope="session")
def evolution_entry(catalog):
    return catalog["evolution"]


@pytest.fixture(scope="session")
def nonlinear_entry(catalog):
    return catalog["nonlinear"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
