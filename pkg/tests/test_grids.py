"""Grid containers, density fields and field moments."""

import numpy as np
import pytest

from braggsolve.errors import ConfigError, DomainError
from braggsolve.grids import (AngularGrid, EnergyGrid, PhaseSpaceField,
                              SpatialGrid, build_density_field, field_moment,
                              make_grids, material_at)
from braggsolve.physics import AIR, WATER


def small_grids():
    return make_grids({"e_min": 1.0, "e_max": 11.0, "groups": 5,
                       "x_max": 2.0, "nx": 4, "ny": 6, "nz": 6,
                       "y_min": -1.5, "y_max": 1.5,
                       "z_min": -1.5, "z_max": 1.5, "nu": 4, "nv": 4})


def test_energy_grid_uniform():
    g = EnergyGrid.uniform(1.0, 11.0, 5)
    assert g.n_groups == 5
    assert np.allclose(g.widths, 2.0)
    assert np.allclose(g.centers, [2, 4, 6, 8, 10])
    with pytest.raises(ConfigError):
        EnergyGrid.uniform(10.0, 1.0, 5)
    with pytest.raises(ConfigError):
        EnergyGrid(np.array([1.0, 1.0, 2.0]))


def test_spatial_grid_centers_and_steps():
    s = SpatialGrid(x_max=2.0, n_x=4, y_min=-1.0, y_max=1.0, n_y=4,
                    z_min=-1.0, z_max=1.0, n_z=2)
    assert s.dx == pytest.approx(0.5)
    assert np.allclose(s.x_slabs, [0.25, 0.75, 1.25, 1.75])
    assert np.allclose(s.y_centers, [-0.75, -0.25, 0.25, 0.75])
    assert np.allclose(s.z_centers, [-0.5, 0.5])
    with pytest.raises(ConfigError):
        SpatialGrid(x_max=-1.0, n_x=4)


def test_angular_grid_interior_nodes():
    a = AngularGrid(n_u=4, n_v=4)
    assert np.allclose(a.u_nodes, [-0.5, 0.0, 0.5])
    assert a.du == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        AngularGrid(n_u=1, n_v=4)


def test_phase_space_field_shape_checks():
    grids = small_grids()
    f = PhaseSpaceField(grids)
    assert f.data.shape == (5, 2, 3, 3, 6, 6)
    with pytest.raises(ConfigError):
        PhaseSpaceField(grids, np.zeros((5, 2, 3, 3, 6, 5)))


def test_field_moment_against_direct_sum():
    grids = small_grids()
    rng = np.random.default_rng(1)
    f = PhaseSpaceField(grids, rng.random((5, 2, 3, 3, 6, 6)))
    mass, eflux = field_moment(f)

    e = grids.energy
    meas = grids.cell_measure
    ref_mass = sum(
        f.data[g, 0].sum() * e.widths[g] * meas for g in range(5))
    ref_eflux = sum(
        (e.centers[g] * f.data[g, 0].sum()
         + e.widths[g] / 6.0 * f.data[g, 1].sum()) * e.widths[g] * meas
        for g in range(5))
    assert mass == pytest.approx(ref_mass, rel=1e-13)
    assert eflux == pytest.approx(ref_eflux, rel=1e-13)


def test_density_field_boxes_override_background():
    grids = small_grids()
    mats = {"water": WATER, "air": AIR}
    dens = build_density_field(
        grids.spatial, mats, "water",
        boxes=(("air", 0.5, 1.0, -1.5, 1.5, -1.5, 1.5),))
    m, rho = material_at(dens, 0.75, 0.0, 0.0)
    assert m.name == "air"
    assert rho == pytest.approx(AIR.density)
    m, rho = material_at(dens, 1.5, 0.0, 0.0)
    assert m.name == "water"
    with pytest.raises(DomainError):
        material_at(dens, 5.0, 0.0, 0.0)


def test_density_field_later_box_wins():
    grids = small_grids()
    mats = {"water": WATER, "air": AIR}
    dens = build_density_field(
        grids.spatial, mats, "air",
        boxes=(("water", 0.0, 2.0, -1.5, 1.5, -1.5, 1.5),
               ("air", 0.0, 0.5, -1.5, 1.5, -1.5, 1.5)))
    assert material_at(dens, 0.25, 0.0, 0.0)[0].name == "air"
    assert material_at(dens, 1.0, 0.0, 0.0)[0].name == "water"


def test_unknown_material_rejected():
    grids = small_grids()
    with pytest.raises(ConfigError):
        build_density_field(grids.spatial, {"water": WATER}, "vacuum")
