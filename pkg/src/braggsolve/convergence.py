"""Self-convergence study over the depth step and the energy grid.

Each level is compared against the next finer one through the slab-wise
traces psi(x_s, E_g) = integral of the field over the lateral and angular
axes (which the depth sweep records exactly). The discrepancy functional

    err_l = sum_{s,g} |psi^l_coarse(s, g) - psi^l_fine(s, g)| dx dE_g

is evaluated for both DG components at shared evaluation points: in depth
the fine slabs ending at coarse slab boundaries, in energy the fine group
centers, where the coarse piecewise-linear representation is evaluated
directly. (Comparing generic in-cell points matters: upwind DG group
means self-converge faster than second order on smooth data, so a mean-to-
mean comparison overstates the order of the scheme as a whole.)

The observed order of each component is the least-squares slope of
log err against log h; the reported order of an axis is the slower of
its two component orders, since that is the rate the scheme can claim.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import RunSpec, execute
from .errors import ConfigError


@dataclass(frozen=True)
class StudyResult:
    axis: str  # "depth" or "energy"
    h: np.ndarray  # step size (cm) or group width (MeV) of the coarse level
    err1: np.ndarray
    err2: np.ndarray
    order1: float
    order2: float

    @property
    def order(self) -> float:
        """Observed order of the axis: the slower component's slope."""
        return min(self.order1, self.order2)


def observed_order(h: np.ndarray, err: np.ndarray) -> float:
    """Least-squares slope of log err vs log h."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    if h.size < 2 or np.any(err <= 0):
        raise ConfigError("need at least two levels with positive errors")
    slope = np.polyfit(np.log(h), np.log(err), 1)[0]
    return float(slope)


def _trace(spec: RunSpec) -> np.ndarray:
    return execute(spec, trace=True).result.traces


def depth_study(base: RunSpec, levels: int = 4) -> StudyResult:
    """Halve the depth step ``levels`` times starting from the base nx."""
    if levels < 2:
        raise ConfigError("depth study needs at least two levels")
    traces = []
    hs = []
    for lev in range(levels + 1):
        gp = dict(base.grid_params)
        gp["nx"] = base.grid_params["nx"] * 2**lev
        spec = replace(base, grid_params=gp)
        traces.append(_trace(spec))
        hs.append(gp["x_max"] / gp["nx"])

    de = base.grids().energy.widths
    err1, err2 = [], []
    for lev in range(levels):
        coarse, fine = traces[lev], traces[lev + 1]
        paired = fine[1::2]  # fine slab 2s+1 ends at the same depth as coarse slab s
        diff = np.abs(coarse - paired)
        err1.append(float((diff[:, :, 0] * de).sum() * hs[lev]))
        err2.append(float((diff[:, :, 1] * de).sum() * hs[lev]))
    h = np.array(hs[:levels])
    return StudyResult("depth", h, np.array(err1), np.array(err2),
                       observed_order(h, err1), observed_order(h, err2))


def prolong_energy(trace: np.ndarray) -> np.ndarray:
    """Evaluate a G-group trace on the child grid with 2G uniform groups.

    The parent piecewise-linear polynomial is evaluated at the two child
    centers (mean +- slope/4 in the value sense, i.e. m -+ s/2 in the DG
    coefficient convention) and its slope coefficient rescales by the
    width ratio 1/2 in the child basis.
    """
    m, s = trace[:, :, 0], trace[:, :, 1]
    out = np.empty((trace.shape[0], trace.shape[1] * 2, 2))
    out[:, 0::2, 0] = m - 0.5 * s
    out[:, 1::2, 0] = m + 0.5 * s
    out[:, 0::2, 1] = 0.5 * s
    out[:, 1::2, 1] = 0.5 * s
    return out


def energy_study(base: RunSpec, levels: int = 4) -> StudyResult:
    """Double the group count ``levels`` times at fixed depth step."""
    if levels < 2:
        raise ConfigError("energy study needs at least two levels")
    traces = []
    des = []
    for lev in range(levels + 1):
        gp = dict(base.grid_params)
        gp["groups"] = base.grid_params["groups"] * 2**lev
        spec = replace(base, grid_params=gp)
        traces.append(_trace(spec))
        des.append((gp["e_max"] - gp["e_min"]) / gp["groups"])

    dx = base.grid_params["x_max"] / base.grid_params["nx"]
    err1, err2 = [], []
    for lev in range(levels):
        diff = np.abs(prolong_energy(traces[lev]) - traces[lev + 1])
        err1.append(float(diff[:, :, 0].sum() * des[lev + 1] * dx))
        err2.append(float(diff[:, :, 1].sum() * des[lev + 1] * dx))
    h = np.array(des[:levels])
    return StudyResult("energy", h, np.array(err1), np.array(err2),
                       observed_order(h, err1), observed_order(h, err2))


def convergence_base_spec() -> RunSpec:
    """Small 50 MeV water scenario used by the standard study."""
    from .beam import BeamSpec

    return RunSpec(
        name="water_50mev_conv",
        beam=BeamSpec(e0_mev=50.0),
        grid_params={
            "e_min": 1.0, "e_max": 60.0, "groups": 59,
            "x_max": 3.2, "nx": 80,
            "y_min": -2.0, "y_max": 2.0, "ny": 8,
            "z_min": -2.0, "z_max": 2.0, "nz": 8,
            "nu": 4, "nv": 4,
        },
    )


def standard_study(depth_levels: int = 3, energy_levels: int = 4):
    """The shipped convergence scenario: returns (depth, energy) results."""
    base = convergence_base_spec()
    depth_base = replace(base, grid_params={**base.grid_params,
                                            "groups": 118, "nx": 80})
    energy_base = replace(base, grid_params={**base.grid_params,
                                             "groups": 59, "nx": 320})
    return (depth_study(depth_base, depth_levels),
            energy_study(energy_base, energy_levels))
