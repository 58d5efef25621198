"""Dose accumulation and clinical depth-dose metrics.

Energy deposited per voxel (MeV) divided by the voxel mass density gives
dose in MeV/g per incident proton. Depth metrics operate on the
integrated depth-dose curve (IDD): Bragg peak position via a parabola
through the discrete maximum and its neighbours, and the proximal P90 /
distal D90 / D20 depths by linear interpolation on the respective flanks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .grids import DensityField, SpatialGrid


@dataclass
class DoseTally:
    """Per-voxel deposited energy (MeV) on the (n_x, n_y, n_z) grid."""

    spatial: SpatialGrid
    edep: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        shape = (self.spatial.n_x, self.spatial.n_y, self.spatial.n_z)
        if self.edep is None:
            self.edep = np.zeros(shape)
        elif self.edep.shape != shape:
            raise DataError(f"tally shape {self.edep.shape} != grid shape {shape}")

    def add_slab(self, s: int, edep_yz: np.ndarray):
        self.edep[s] += edep_yz

    def dose(self, density: DensityField) -> np.ndarray:
        """Dose in MeV/g per incident proton."""
        return self.edep / (density.rho * self.spatial.dy * self.spatial.dz
                            * self.spatial.dx)


def integrated_depth_dose(dose: np.ndarray, spatial: SpatialGrid) -> np.ndarray:
    """Laterally integrated dose, shape (n_x,): sum dose * dy dz."""
    return dose.sum(axis=(1, 2)) * spatial.dy * spatial.dz


def longitudinal_dose(dose: np.ndarray, spatial: SpatialGrid) -> np.ndarray:
    """Dose integrated over z only, shape (n_x, n_y)."""
    return dose.sum(axis=2) * spatial.dz


def bragg_peak_position(idd: np.ndarray, x: np.ndarray) -> float:
    """Peak depth refined with a parabola through the maximum and neighbours."""
    idd = np.asarray(idd, dtype=float)
    if idd.size < 3 or np.all(idd <= 0):
        raise DataError("depth-dose curve too short or empty for peak finding")
    i = int(np.argmax(idd))
    if i == 0 or i == idd.size - 1:
        return float(x[i])
    y0, y1, y2 = idd[i - 1], idd[i], idd[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(x[i])
    return float(x[i] + 0.5 * (y0 - y2) / denom * (x[i + 1] - x[i]))


def _crossing(x, idd, level, side) -> float:
    """Depth where idd crosses `level`, scanning from the peak outward."""
    i_pk = int(np.argmax(idd))
    if side == "proximal":
        idx = np.arange(i_pk, -1, -1)
    else:
        idx = np.arange(i_pk, idd.size)
    below = idx[idd[idx] < level]
    if below.size == 0:
        raise DataError(f"curve never falls below {level:.4g} on the {side} side")
    j = below[0]
    k = j + 1 if side == "proximal" else j - 1
    x0, x1 = x[j], x[k]
    y0, y1 = idd[j], idd[k]
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


@dataclass(frozen=True)
class DepthMetrics:
    bragg_peak_cm: float
    p90_cm: float
    d90_cm: float
    d20_cm: float


def depth_metrics(idd: np.ndarray, x: np.ndarray) -> DepthMetrics:
    """Bragg peak plus the 90%/90%/20% depths of the depth-dose curve."""
    idd = np.asarray(idd, dtype=float)
    x = np.asarray(x, dtype=float)
    peak = idd.max()
    return DepthMetrics(
        bragg_peak_cm=bragg_peak_position(idd, x),
        p90_cm=_crossing(x, idd, 0.9 * peak, "proximal"),
        d90_cm=_crossing(x, idd, 0.9 * peak, "distal"),
        d20_cm=_crossing(x, idd, 0.2 * peak, "distal"),
    )


def spot_sigma(dose_yz: np.ndarray, y: np.ndarray, z: np.ndarray):
    """Dose-weighted lateral standard deviations (sigma_y, sigma_z) of a slice."""
    w = np.asarray(dose_yz, dtype=float)
    total = w.sum()
    if total <= 0:
        raise DataError("spot slice carries no dose")
    wy = w.sum(axis=1)
    wz = w.sum(axis=0)
    my = float(np.dot(wy, y) / total)
    mz = float(np.dot(wz, z) / total)
    sy = float(np.sqrt(np.dot(wy, (y - my) ** 2) / total))
    sz = float(np.sqrt(np.dot(wz, (z - mz) ** 2) / total))
    return sy, sz
