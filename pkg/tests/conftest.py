"""Shared fixtures: cached preset runs and synthetic toy problems.

The preset executions dominate the suite runtime, so every run is
session-scoped and shared between the unit tests and the acceptance
checks that grade the same scenario from different angles.
"""

import time

import numpy as np
import pytest

from braggsolve.config import execute
from braggsolve.grids import EnergyGrid
from braggsolve.physics import WATER, PhysicsTables
from braggsolve.presets import get_preset, water_100mev_scatter


@pytest.fixture(scope="session")
def water50_out():
    return execute(get_preset("water_50mev"))


@pytest.fixture(scope="session")
def water100_out():
    return execute(get_preset("water_100mev"))


@pytest.fixture(scope="session")
def water230_out():
    return execute(get_preset("water_230mev"))


@pytest.fixture(scope="session")
def bone_out():
    return execute(get_preset("bone_100mev"))


@pytest.fixture(scope="session")
def airgap_out():
    return execute(get_preset("water_air_water_100mev"))


@pytest.fixture(scope="session")
def small_out():
    return execute(get_preset("water_50mev_small"))


@pytest.fixture(scope="session")
def scatter_pair():
    """Outputs of the synthetic-scatter preset at truncation orders 1 and 2."""
    return execute(water_100mev_scatter(1)), execute(water_100mev_scatter(2))


@pytest.fixture(scope="session")
def study_results():
    """(depth StudyResult, energy StudyResult, elapsed seconds)."""
    from braggsolve.convergence import standard_study

    t0 = time.time()
    depth, energy = standard_study()
    return depth, energy, time.time() - t0


def make_toy_tables(n_groups=4, seed=0, sigma_ct=0.0):
    """Random positive physics tables on a small uniform grid."""
    rng = np.random.default_rng(seed)
    grid = EnergyGrid.uniform(1.0, 1.0 + 2.0 * n_groups, n_groups)
    return PhysicsTables(
        material=WATER,
        grid=grid,
        s_edges=1.0 + rng.random(n_groups + 1),
        t_centers=0.05 + 0.05 * rng.random(n_groups),
        sigma_tr_g=1e-4 * (1.0 + rng.random(n_groups)),
        sigma_ct_g=np.full(n_groups, float(sigma_ct)),
    )
