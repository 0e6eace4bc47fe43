from __future__ import annotations

import numpy as np
import pytest

from ffprog import ConfigurationSystem, IntPolynomial, PrimeContext, context_for, standard_system


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ctx5() -> PrimeContext:
    return context_for(5)


@pytest.fixture(scope="session")
def ctx7() -> PrimeContext:
    return context_for(7)


@pytest.fixture(scope="session")
def ctx11() -> PrimeContext:
    return context_for(11)


@pytest.fixture(scope="session")
def square_system() -> ConfigurationSystem:
    """k = 1, P_1 = y^2 along v_1 = 1 in F_p."""
    return ConfigurationSystem(dimension=1, vectors=((1,),), polys=(IntPolynomial.of(0, 0, 1),))


@pytest.fixture(scope="session")
def line_system() -> ConfigurationSystem:
    return standard_system(1)


@pytest.fixture(scope="session")
def plane_system() -> ConfigurationSystem:
    return standard_system(2)


@pytest.fixture(scope="session")
def rational_system() -> ConfigurationSystem:
    return standard_system(1, rational=True)


@pytest.fixture(scope="session")
def rational_plane_system() -> ConfigurationSystem:
    return standard_system(2, rational=True)
