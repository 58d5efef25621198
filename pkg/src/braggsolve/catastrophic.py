"""Catastrophic (large-loss, wide-angle) scattering kernel and source.

Rare hard collisions are modelled as removal at rate sigma_ct from the
current scatter order plus re-injection into the next order, factorized
into an exponential energy-loss kernel and a Gamma-distributed polar
deflection between the discrete direction nodes:

    sigma_cs(g' -> g, w' -> w) = sigma_ct(g') P1(g' -> g) P2(w' -> w)

Both discrete kernels are normalized so the re-injected particle count
equals the removed count exactly: P1 rows sum to one over the reachable
(lower or equal) groups, and P2 rows integrate to one against the du dv
measure over destination nodes.

Kernel parameters come either from configuration or from a maximum
likelihood fit to recorded collision trajectories (energy loss and
deflection angle per event).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, polygamma
from scipy.stats import gamma as gamma_dist

from .errors import DataError
from .grids import AngularGrid, EnergyGrid, Grids

MIN_FIT_SAMPLES = 30


@dataclass(frozen=True)
class KernelParams:
    """Fitted kernel parameters: exponential loss rate and Gamma deflection."""

    lam: float  # 1/MeV
    alpha: float  # Gamma shape
    beta: float  # Gamma rate, 1/rad

    def __post_init__(self):
        if self.lam <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise DataError("kernel parameters must be positive")


def read_trajectories(path):
    """Load collision records; returns (losses MeV, thetas rad) arrays.

    Expected columns: group, e_before_mev, e_after_mev, theta_rad.
    """
    losses, thetas = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"group", "e_before_mev", "e_after_mev", "theta_rad"}
        if reader.fieldnames is None or not need.issubset(reader.fieldnames):
            raise DataError(f"trajectory file {path} missing columns {need}")
        for row in reader:
            losses.append(float(row["e_before_mev"]) - float(row["e_after_mev"]))
            thetas.append(float(row["theta_rad"]))
    losses = np.array(losses)
    thetas = np.array(thetas)
    if np.any(losses <= 0):
        raise DataError("trajectory energy losses must be positive")
    if np.any(thetas <= 0):
        raise DataError("trajectory deflection angles must be positive")
    return losses, thetas


def read_sigma_ct(path, grid: EnergyGrid) -> np.ndarray:
    """Load the per-group removal cross section (columns: group, sigma_ct_per_cm)."""
    vals = np.full(grid.n_groups, np.nan)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"group", "sigma_ct_per_cm"}.issubset(
            reader.fieldnames
        ):
            raise DataError(f"cross-section file {path} needs group, sigma_ct_per_cm")
        for row in reader:
            g = int(row["group"])
            if not 0 <= g < grid.n_groups:
                raise DataError(f"group index {g} outside 0..{grid.n_groups - 1}")
            vals[g] = float(row["sigma_ct_per_cm"])
    if np.any(np.isnan(vals)):
        raise DataError("cross-section file does not cover every group")
    if np.any(vals < 0):
        raise DataError("cross sections must be nonnegative")
    return vals


def fit_exponential(losses: np.ndarray) -> float:
    """Maximum likelihood rate of an exponential: 1 / sample mean."""
    losses = np.asarray(losses, dtype=float)
    if losses.size < MIN_FIT_SAMPLES:
        raise DataError(f"need at least {MIN_FIT_SAMPLES} loss samples, got {losses.size}")
    if np.any(losses <= 0):
        raise DataError("loss samples must be positive")
    return 1.0 / float(losses.mean())


def fit_gamma(thetas: np.ndarray, max_newton: int = 20):
    """Gamma (shape, rate) fit: moment start, Newton refinement of the MLE.

    The profile likelihood reduces to ln(alpha) - digamma(alpha) = s with
    s = ln(mean) - mean(ln). Falls back to the moment estimate when the
    iteration leaves the feasible region.
    """
    x = np.asarray(thetas, dtype=float)
    if x.size < MIN_FIT_SAMPLES:
        raise DataError(f"need at least {MIN_FIT_SAMPLES} angle samples, got {x.size}")
    if np.any(x <= 0):
        raise DataError("angle samples must be positive")
    m = x.mean()
    var = x.var()
    if var <= 0:
        raise DataError("angle samples are degenerate")
    alpha_mom = m * m / var
    s = np.log(m) - np.log(x).mean()
    alpha = alpha_mom
    ok = True
    for _ in range(max_newton):
        f = np.log(alpha) - digamma(alpha) - s
        fp = 1.0 / alpha - polygamma(1, alpha)
        step = f / fp
        if not np.isfinite(step) or alpha - step <= 0:
            ok = False
            break
        alpha -= step
        if abs(step) < 1e-12 * alpha:
            break
    if not ok or not np.isfinite(alpha):
        alpha = alpha_mom
    return float(alpha), float(alpha / m)


def fit_kernel(losses, thetas) -> KernelParams:
    alpha, beta = fit_gamma(thetas)
    return KernelParams(fit_exponential(losses), alpha, beta)


def energy_kernel(grid: EnergyGrid, lam: float) -> np.ndarray:
    """Row-stochastic P1[g', g]: exponential loss evaluated at group centers.

    Downscatter only (g <= g'), renormalized row by row so removal and
    re-injection balance exactly on the discrete grid.
    """
    centers = grid.centers
    loss = centers[:, None] - centers[None, :]
    p1 = np.where(loss >= 0, lam * np.exp(-lam * np.maximum(loss, 0.0)), 0.0)
    p1 *= grid.widths[None, :]
    return p1 / p1.sum(axis=1, keepdims=True)


def angle_kernel(angular: AngularGrid, alpha: float, beta: float) -> np.ndarray:
    """P2[w', w] over flattened direction nodes, unit du dv row integral.

    The deflection angle between two reduced directions is recovered from
    the cosine Theta = (1 + u u' + v v') / (n n'), clamped to [-1, 1]. The
    zero self-angle is replaced by half the angle to the nearest
    neighbouring node so the Gamma density stays finite for shape < 1 and
    nonzero for shape > 1.
    """
    uu, vv = np.meshgrid(angular.u_nodes, angular.v_nodes, indexing="ij")
    u = uu.ravel()
    v = vv.ravel()
    norm = np.sqrt(1.0 + u**2 + v**2)
    cos = (1.0 + u[:, None] * u[None, :] + v[:, None] * v[None, :]) \
        / (norm[:, None] * norm[None, :])
    theta = np.arccos(np.clip(cos, -1.0, 1.0))

    m = theta.shape[0]
    for i in range(m):
        off = theta[i][theta[i] > 0]
        theta[i, i] = 0.5 * off.min() if off.size else 1.0

    p2 = gamma_dist.pdf(theta, a=alpha, scale=1.0 / beta)
    rowsum = p2.sum(axis=1) * angular.du * angular.dv
    if np.any(rowsum <= 0):
        raise DataError("deflection kernel vanishes on the angular grid")
    return p2 / rowsum[:, None]


class CatastrophicKernel:
    """Precomputed discrete kernels plus the scatter-source evaluation."""

    def __init__(self, grids: Grids, params: KernelParams, sigma_ct_g: np.ndarray):
        self.grids = grids
        self.params = params
        self.sigma_ct_g = np.asarray(sigma_ct_g, dtype=float)
        if self.sigma_ct_g.shape != (grids.energy.n_groups,):
            raise DataError("sigma_ct_g must have one value per energy group")
        de = grids.energy.widths
        p1 = energy_kernel(grids.energy, params.lam)
        # C[g', g] folds the removal rate and the density measure change.
        self._c = (self.sigma_ct_g * de)[:, None] * p1 / de[None, :]
        self._p2 = angle_kernel(grids.angular, params.alpha, params.beta)

    def source(self, data: np.ndarray) -> np.ndarray:
        """Re-injection source for the next scatter order; same layout as data.

        Only the group-mean component is fed; the slope channel of the
        source is zero.
        """
        g = self.grids
        n_ang = self._p2.shape[0]
        psi1 = data[:, 0].reshape(g.energy.n_groups, n_ang, -1)
        w = np.einsum("ij,ikl->jkl", self._c, psi1)
        src_mean = g.angular.du * g.angular.dv * np.einsum("kj,ikl->ijl", self._p2, w)
        out = np.zeros_like(data)
        out[:, 0] = src_mean.reshape(data[:, 0].shape)
        return out
