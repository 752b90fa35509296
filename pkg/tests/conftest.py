import numpy as np
import pytest

from condenser_widths import (concentric_condenser, offset_condenser, Condenser,
                              CurveSpec, EDomain, fekete_green, leja_weighted,
                              m_theta, theta_sweep)


@pytest.fixture(scope="session")
def concentric():
    return concentric_condenser()


@pytest.fixture(scope="session")
def concentric_e2():
    return Condenser(EDomain.disk(0j, 1.0), CurveSpec.circle(0j, float(np.e) ** 2)).validate()


@pytest.fixture(scope="session")
def offset():
    return offset_condenser()


@pytest.fixture(scope="session")
def segment_pair():
    return Condenser(EDomain.segment(-1.0, 1.0), CurveSpec.circle(0j, 3.0)).validate()


# heavier shared artifacts, computed once per session


@pytest.fixture(scope="session")
def concentric_lambda_256(concentric):
    return fekete_green(concentric, 0.5, 256, 4096, seed=0)


@pytest.fixture(scope="session")
def concentric_mu_256(concentric, concentric_lambda_256):
    return leja_weighted(concentric, concentric_lambda_256, 0.5, 256, 4096)


@pytest.fixture(scope="session")
def concentric_sweep(concentric):
    thetas = [round(0.05 * i, 10) for i in range(21)]
    return theta_sweep(concentric, thetas, n_points=160, grid_n=4096, seed=0)


@pytest.fixture(scope="session")
def concentric_m_small_theta(concentric):
    # small-theta constant at higher resolution for the slope checks
    return m_theta(concentric, 0.05, 512, 8192, seed=0)
