"""Fokker-Planck angular diffusion substep.

The small-angle scattering operator is (sigma_tr rho / 2) times the
Laplacian in the reduced direction cosines (u, v), with zero Dirichlet
data on the boundary of the angular box. The 5-point Laplacian on the
interior nodes is diagonalized by the type-I discrete sine transform,
so one Crank-Nicolson depth step reduces to a forward DST, a pointwise
multiply by the per-mode amplification factor, and an inverse DST.

Eigenvalues of the 1-D second-difference operator with I intervals are
(2 cos(pi m / I) - 2) / du^2 for m = 1..I-1; every mode factor therefore
has magnitude at most one and the substep is unconditionally stable.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dstn, idstn


def mode_rates(n_u: int, n_v: int, du: float, dv: float) -> np.ndarray:
    """Laplacian eigenvalues a_mn (<= 0) on the (n_u-1) x (n_v-1) modes."""
    m = np.arange(1, n_u)
    n = np.arange(1, n_v)
    lam_u = (2.0 * np.cos(np.pi * m / n_u) - 2.0) / du**2
    lam_v = (2.0 * np.cos(np.pi * n / n_v) - 2.0) / dv**2
    return lam_u[:, None] + lam_v[None, :]


def sine_matrix(n: int) -> np.ndarray:
    """DST-I synthesis matrix on the n - 1 interior nodes of n intervals."""
    i = np.arange(1, n)
    return np.sin(np.pi * i[:, None] * i[None, :] / n)


MATMUL_MODE_LIMIT = 128  # at most this many angular modes for the matmul path


class AngularDiffusion:
    """Spectral Crank-Nicolson stepper over the angular axes of a field.

    Factors depend on the per-group diffusion rate sigma_tr_g * rho / 2,
    so they are precomputed per (density, depth increment). For small
    angular grids the whole substep collapses to one precomputed dense
    matrix per group acting on the flattened angular axis, which beats
    batched FFTs of tiny length; large grids use the transform directly.
    """

    def __init__(self, grids, sigma_tr_g: np.ndarray):
        self.grids = grids
        self.sigma_tr_g = np.asarray(sigma_tr_g, dtype=float)
        ang = grids.angular
        self._rates = mode_rates(ang.n_u, ang.n_v, ang.du, ang.dv)
        self._n_modes = (ang.n_u - 1) * (ang.n_v - 1)
        self._cache = {}
        self._op_cache = {}

    def factors(self, rho: float, h: float) -> np.ndarray:
        key = (float(rho), float(h))
        fac = self._cache.get(key)
        if fac is None:
            a = 0.5 * self.sigma_tr_g[:, None, None] * rho * self._rates[None]
            fac = (1.0 + 0.5 * h * a) / (1.0 - 0.5 * h * a)
            self._cache[key] = fac
        return fac

    def _operators(self, rho: float, h: float) -> np.ndarray:
        """Per-group dense step operators K diag(fac) K^-1, shape (G, A, A)."""
        key = (float(rho), float(h))
        ops = self._op_cache.get(key)
        if ops is None:
            ang = self.grids.angular
            k = np.kron(sine_matrix(ang.n_u), sine_matrix(ang.n_v))
            # DST-I is involutive up to n/2 per axis, so K^-1 = c K.
            c = 4.0 / (ang.n_u * ang.n_v)
            fac = self.factors(rho, h).reshape(-1, self._n_modes)
            ops = c * np.einsum("ab,gb,bc->gac", k, fac, k, optimize=True)
            self._op_cache[key] = ops
        return ops

    def step(self, data: np.ndarray, rho: float, h: float,
             group_offset: int = 0) -> np.ndarray:
        """Advance field data (g, 2, n_u-1, n_v-1, ...) by one increment h.

        ``data`` may cover a contiguous slice of groups starting at
        ``group_offset``; both DG energy components diffuse identically.
        Operates out of place and returns the new array.
        """
        g = data.shape[0]
        if self._n_modes <= MATMUL_MODE_LIMIT:
            ops = self._operators(rho, h)[group_offset:group_offset + g]
            shape = data.shape
            flat = data.reshape(g, 2, self._n_modes, -1)
            out = np.matmul(ops[:, None], flat)
            return out.reshape(shape)
        fac = self.factors(rho, h)[group_offset:group_offset + g, None]
        fac = fac.reshape(fac.shape + (1,) * (data.ndim - 4))
        hat = dstn(data, type=1, axes=(2, 3))
        hat *= fac
        return idstn(hat, type=1, axes=(2, 3))
