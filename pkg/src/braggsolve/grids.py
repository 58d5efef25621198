"""Discretization grids and the phase-space field container.

The solver state lives on a tensor-product grid: depth slabs along x,
finite-volume cells in the lateral (y, z) plane, interior nodes of a
uniform mesh in the reduced direction cosines (u, v), and a multigroup
energy axis carrying two DG coefficients per group (cell mean and slope).

Angular boundary nodes carry the zero Dirichlet condition and are not
stored: an angular axis configured with N cells holds N - 1 interior
nodes per direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class EnergyGrid:
    """Multigroup energy axis in MeV; group index increases with energy."""

    edges: np.ndarray  # shape (G + 1,), strictly increasing

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("energy grid needs at least one group")
        if np.any(np.diff(edges) <= 0):
            raise ConfigError("energy edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def uniform(cls, e_min=1.0, e_max=260.0, groups=500):
        if groups < 1 or e_max <= e_min:
            raise ConfigError("invalid energy grid specification")
        return cls(np.linspace(e_min, e_max, groups + 1))

    @property
    def n_groups(self) -> int:
        return self.edges.size - 1

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


@dataclass(frozen=True)
class SpatialGrid:
    """Depth slabs plus lateral finite-volume cells over (-4, 4)^2 cm by default."""

    x_max: float
    n_x: int
    y_min: float = -4.0
    y_max: float = 4.0
    n_y: int = 80
    z_min: float = -4.0
    z_max: float = 4.0
    n_z: int = 80

    def __post_init__(self):
        if self.x_max <= 0 or self.n_x < 1 or self.n_y < 1 or self.n_z < 1:
            raise ConfigError("spatial grid extents and counts must be positive")
        if self.y_max <= self.y_min or self.z_max <= self.z_min:
            raise ConfigError("lateral bounds must be increasing")

    @property
    def dx(self) -> float:
        return self.x_max / self.n_x

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.n_y

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_z

    @property
    def x_slabs(self) -> np.ndarray:
        """Slab midpoints along depth."""
        return (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.n_y) + 0.5) * self.dy

    @property
    def z_centers(self) -> np.ndarray:
        return self.z_min + (np.arange(self.n_z) + 0.5) * self.dz


@dataclass(frozen=True)
class AngularGrid:
    """Uniform mesh on (-1, 1)^2; only interior nodes are stored.

    ``n_u`` counts mesh intervals per direction, so there are n_u - 1
    interior nodes at u_i = -1 + i * du. The node layout is symmetric
    about zero and, for even counts, contains u = 0 exactly.
    """

    n_u: int = 20
    n_v: int = 20
    u_lim: float = 1.0
    v_lim: float = 1.0

    def __post_init__(self):
        if self.n_u < 2 or self.n_v < 2:
            raise ConfigError("angular mesh needs at least 2 intervals per axis")
        if self.u_lim <= 0 or self.v_lim <= 0:
            raise ConfigError("angular domain half-widths must be positive")

    @property
    def du(self) -> float:
        return 2.0 * self.u_lim / self.n_u

    @property
    def dv(self) -> float:
        return 2.0 * self.v_lim / self.n_v

    @property
    def u_nodes(self) -> np.ndarray:
        return -self.u_lim + self.du * np.arange(1, self.n_u)

    @property
    def v_nodes(self) -> np.ndarray:
        return -self.v_lim + self.dv * np.arange(1, self.n_v)


@dataclass(frozen=True)
class Grids:
    energy: EnergyGrid
    spatial: SpatialGrid
    angular: AngularGrid

    @property
    def cell_measure(self) -> float:
        """dy*dz*du*dv, the per-cell phase-space measure excluding energy."""
        s, a = self.spatial, self.angular
        return s.dy * s.dz * a.du * a.dv


def make_grids(config) -> Grids:
    """Build the three grids from a mapping with the documented keys.

    Expected keys (all optional, desk-scale defaults):
    e_min, e_max, groups, x_max, nx, ny, nz, y_min/max, z_min/max, nu, nv.
    """
    get = config.get if hasattr(config, "get") else lambda k, d: getattr(config, k, d)
    energy = EnergyGrid.uniform(
        float(get("e_min", 1.0)), float(get("e_max", 260.0)), int(get("groups", 500))
    )
    spatial = SpatialGrid(
        x_max=float(get("x_max", 40.0)),
        n_x=int(get("nx", 4000)),
        y_min=float(get("y_min", -4.0)),
        y_max=float(get("y_max", 4.0)),
        n_y=int(get("ny", 80)),
        z_min=float(get("z_min", -4.0)),
        z_max=float(get("z_max", 4.0)),
        n_z=int(get("nz", 80)),
    )
    angular = AngularGrid(n_u=int(get("nu", 20)), n_v=int(get("nv", 20)))
    return Grids(energy, spatial, angular)


class PhaseSpaceField:
    """DG coefficients at one depth slab for one scatter order.

    Data layout is (G, 2, N_u-1, N_v-1, N_y, N_z): group-major with the
    two DG components adjacent, so the energy substep can view the array
    as a (2G, n_phase) matrix without copying, while the angular and
    lateral substeps stream over the trailing axes.
    """

    def __init__(self, grids: Grids, data: np.ndarray | None = None):
        self.grids = grids
        shape = (
            grids.energy.n_groups,
            2,
            grids.angular.n_u - 1,
            grids.angular.n_v - 1,
            grids.spatial.n_y,
            grids.spatial.n_z,
        )
        if data is None:
            data = np.zeros(shape)
        else:
            data = np.ascontiguousarray(data, dtype=float)
            if data.shape != shape:
                raise ConfigError(f"field shape {data.shape} != grid shape {shape}")
        self.data = data

    def copy(self) -> "PhaseSpaceField":
        return PhaseSpaceField(self.grids, self.data.copy())

    def save(self, path):
        np.save(path, self.data)

    @classmethod
    def load(cls, grids: Grids, path) -> "PhaseSpaceField":
        return cls(grids, np.load(path))


def field_moment(field: PhaseSpaceField, grids: Grids | None = None):
    """Total mass and energy flux of a field.

    mass  = sum psi^1 * dE_g * dy dz du dv
    eflux = sum (E_g * psi^1 + dE_g * psi^2 / 6) * dE_g * dy dz du dv
    Only the cell-mean component carries mass; the slope integrates to
    zero over each group but shifts where within the group the mass sits,
    hence the psi^2 term in the energy moment.
    """
    g = grids if grids is not None else field.grids
    w = g.energy.widths * g.cell_measure
    per_mean = field.data[:, 0].sum(axis=(1, 2, 3, 4))
    per_slope = field.data[:, 1].sum(axis=(1, 2, 3, 4))
    mass = float(np.dot(w, per_mean))
    eflux = float(
        np.dot(w * g.energy.centers, per_mean)
        + np.dot(w * g.energy.widths / 6.0, per_slope)
    )
    return mass, eflux


def energy_per_column(field: PhaseSpaceField) -> np.ndarray:
    """Energy flux resolved on the lateral (y, z) grid; shape (N_y, N_z).

    Uses the same group energy moment as ``field_moment`` so per-column
    deposits telescope exactly against the global budget.
    """
    g = field.grids
    w1 = g.energy.widths * g.energy.centers * g.cell_measure
    w2 = g.energy.widths**2 / 6.0 * g.cell_measure
    out = np.tensordot(w1, field.data[:, 0].sum(axis=(1, 2)), axes=(0, 0))
    out += np.tensordot(w2, field.data[:, 1].sum(axis=(1, 2)), axes=(0, 0))
    return out


@dataclass
class DensityField:
    """Voxel map of material index and density on the depth x lateral grid."""

    spatial: SpatialGrid
    materials: list  # Material objects, indexed by mat_index entries
    mat_index: np.ndarray = field(repr=False, default=None)  # (n_x, n_y, n_z) int
    rho: np.ndarray = field(repr=False, default=None)  # (n_x, n_y, n_z) g/cm^3

    def __post_init__(self):
        if self.mat_index is None or self.rho is None:
            raise ConfigError("DensityField requires mat_index and rho arrays")
        if np.any(self.rho <= 0):
            raise ConfigError("density must be positive everywhere")

    def slab(self, s: int):
        """Material-index and density slices for depth slab s."""
        return self.mat_index[s], self.rho[s]


def build_density_field(spatial: SpatialGrid, materials_by_name: dict,
                        background: str, boxes=()) -> DensityField:
    """Fill the voxel map from a background material and override boxes.

    Each box is (material_name, x0, x1, y0, y1, z0, z1); later boxes win.
    Assignment uses voxel-center (nearest-cell) semantics.
    """
    if background not in materials_by_name:
        raise ConfigError(f"unknown background material {background!r}")
    names = [background]
    for b in boxes:
        if b[0] not in materials_by_name:
            raise ConfigError(f"unknown material {b[0]!r} in geometry box")
        if b[0] not in names:
            names.append(b[0])
    mats = [materials_by_name[n] for n in names]
    idx_of = {n: i for i, n in enumerate(names)}

    xc = spatial.x_slabs
    yc = spatial.y_centers
    zc = spatial.z_centers
    mat_index = np.zeros((spatial.n_x, spatial.n_y, spatial.n_z), dtype=np.int16)
    for name, x0, x1, y0, y1, z0, z1 in boxes:
        mx = (xc >= x0) & (xc < x1)
        my = (yc >= y0) & (yc < y1)
        mz = (zc >= z0) & (zc < z1)
        sel = np.ix_(np.where(mx)[0], np.where(my)[0], np.where(mz)[0])
        mat_index[sel] = idx_of[name]
    dens = np.array([m.density for m in mats])
    return DensityField(spatial, mats, mat_index, dens[mat_index])


def material_at(density_field: DensityField, x: float, y: float, z: float):
    """Material and density of the voxel containing (x, y, z)."""
    s = density_field.spatial
    if not (0.0 <= x <= s.x_max and s.y_min <= y <= s.y_max and s.z_min <= z <= s.z_max):
        raise DomainError(f"point ({x}, {y}, {z}) outside domain")
    i = min(int(x / s.dx), s.n_x - 1)
    j = min(int((y - s.y_min) / s.dy), s.n_y - 1)
    k = min(int((z - s.z_min) / s.dz), s.n_z - 1)
    m = density_field.materials[density_field.mat_index[i, j, k]]
    return m, float(density_field.rho[i, j, k])
