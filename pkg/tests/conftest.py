import numpy as np
import pytest

from airymax.airy2 import build_joint_density_grid
from airymax.lax import build_psi_grid, default_zeta_rule
from airymax.painleve import solve_hastings_mcleod


@pytest.fixture(scope="session")
def sol():
    return solve_hastings_mcleod()


@pytest.fixture(scope="session")
def psi(sol):
    return build_psi_grid(default_zeta_rule(), sol)


@pytest.fixture(scope="session")
def joint_grid(sol):
    return build_joint_density_grid(sol)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240807)
