"""Lateral streaming substep: u d/dy + v d/dz finite-volume advection.

Each angular node (u, v) advects the lateral plane with its own constant
velocity, so the substep is a family of independent linear advection
problems sharing one grid. Faces use monotonized upwind reconstruction
(van Leer style double-bound limiter); lateral boundaries replicate the
edge cell (zero gradient), which lets mass leave the box freely.

Because the velocity has one sign per angular node, the flux only ever
needs the reconstruction from the upwind side. The divergence routine
therefore splits the angular axis into its negative / positive velocity
blocks (nodes are sorted, so these are contiguous slices) and evaluates a
single one-sided limited flux per block, entirely with array views.

The default update is explicit and unsplit. When the depth increment is
too large for the explicit stability bound, the substep switches to a
Crank-Nicolson first-order upwind solve with the high-order flux
correction deferred to the old state. The implicit matrix is triangular
along the sweep direction of each sign quadrant, so it is solved by
marching antidiagonals of the lateral grid, vectorized over groups and
angular nodes.
"""

from __future__ import annotations

import numpy as np

from .grids import Grids

EXPLICIT_NU_LIMIT = 0.9


def limiter(theta: np.ndarray) -> np.ndarray:
    """Slope limiter eta(theta) = max(0, min(2 theta, 1), min(theta, 2))."""
    return np.maximum(0.0, np.maximum(np.minimum(2.0 * theta, 1.0),
                                      np.minimum(theta, 2.0)))


def _limited_delta(num, den):
    """den * eta(num / den), with the 0/0 convention delta = 0.

    Evaluated division-free: for num * den > 0 the product reduces to
    sign(den) * max(min(2|num|, |den|), min(|num|, 2|den|)); otherwise 0.
    """
    a = np.abs(num)
    b = np.abs(den)
    mag = np.maximum(np.minimum(2.0 * a, b), np.minimum(a, 2.0 * b))
    return np.where(num * den > 0.0, np.copysign(mag, den), 0.0)


def _pad_edges(q: np.ndarray, axis: int, before: int, after: int) -> np.ndarray:
    """Replicate edge cells (zero-gradient ghosts) along one axis."""
    parts = [np.take(q, [0], axis=axis)] * before + [q] \
        + [np.take(q, [-1], axis=axis)] * after
    return np.concatenate(parts, axis=axis)


def _upwind_flux(q: np.ndarray, axis: int, positive: bool) -> np.ndarray:
    """Limited one-sided face values on the N+1 faces along ``axis``.

    For positive velocity the left-state reconstruction q_L + delta/2 is
    returned, for negative the right state q_R - delta/2; multiply by the
    velocity to get the flux.
    """
    n = q.shape[axis]
    ix = lambda arr, lo, hi: arr[(slice(None),) * axis + (slice(lo, hi),)]
    if positive:
        qp = _pad_edges(q, axis, 2, 1)  # length n + 3
        left = ix(qp, 1, n + 2)
        den = ix(qp, 2, n + 3) - left
        num = left - ix(qp, 0, n + 1)
        return left + 0.5 * _limited_delta(num, den)
    qp = _pad_edges(q, axis, 1, 2)
    right = ix(qp, 1, n + 2)
    den = right - ix(qp, 0, n + 1)
    num = ix(qp, 2, n + 3) - right
    return right - 0.5 * _limited_delta(num, den)


def _sign_blocks(nodes: np.ndarray):
    """(slice, positive?) pairs covering the nonzero-velocity nodes."""
    neg = int(np.searchsorted(nodes, 0.0, side="left"))
    pos = int(np.searchsorted(nodes, 0.0, side="right"))
    blocks = []
    if neg > 0:
        blocks.append((slice(0, neg), False))
    if pos < nodes.size:
        blocks.append((slice(pos, nodes.size), True))
    return blocks


def muscl_divergence(data: np.ndarray, grids: Grids) -> np.ndarray:
    """Flux divergence D(psi) such that d psi / dx = -D(psi).

    data has the field layout (G, 2, n_u-1, n_v-1, n_y, n_z); zero-velocity
    angular nodes contribute nothing and are skipped.
    """
    ang, s = grids.angular, grids.spatial
    div = np.zeros_like(data)
    for sl, positive in _sign_blocks(ang.u_nodes):
        u = ang.u_nodes[sl][:, None, None, None]
        face = _upwind_flux(data[:, :, sl], axis=4, positive=positive)
        flux = u * face
        div[:, :, sl] += (flux[..., 1:, :] - flux[..., :-1, :]) / s.dy
    for sl, positive in _sign_blocks(ang.v_nodes):
        v = ang.v_nodes[sl][:, None, None]
        face = _upwind_flux(data[:, :, :, sl], axis=5, positive=positive)
        flux = v * face
        div[:, :, :, sl] += (flux[..., 1:] - flux[..., :-1]) / s.dz
    return div


def _upwind_divergence(data: np.ndarray, grids: Grids) -> np.ndarray:
    """First-order upwind divergence with replicated-edge boundaries."""
    ang, s = grids.angular, grids.spatial
    out = np.zeros_like(data)
    for sl, positive in _sign_blocks(ang.u_nodes):
        u = ang.u_nodes[sl][:, None, None, None]
        q = data[:, :, sl]
        qp = _pad_edges(q, 4, 1, 1)
        if positive:
            out[:, :, sl] += u * (q - qp[..., :-2, :]) / s.dy
        else:
            out[:, :, sl] += u * (qp[..., 2:, :] - q) / s.dy
    for sl, positive in _sign_blocks(ang.v_nodes):
        v = ang.v_nodes[sl][:, None, None]
        q = data[:, :, :, sl]
        qp = _pad_edges(q, 5, 1, 1)
        if positive:
            out[:, :, :, sl] += v * (q - qp[..., :-2]) / s.dz
        else:
            out[:, :, :, sl] += v * (qp[..., 2:] - q) / s.dz
    return out


def _sweep_quadrant(rhs: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (1 + a + b) x[j,k] - a x[j-1,k] - b x[j,k-1] = rhs by wavefronts.

    a, b >= 0 broadcast against rhs.shape[:-2]; the j = 0 row and k = 0
    column drop the corresponding upstream coupling (replicated ghost has
    zero gradient, so the upwind difference vanishes there).
    """
    ny, nz = rhs.shape[-2], rhs.shape[-1]
    x = np.zeros_like(rhs)
    a = np.asarray(a)[..., None]
    b = np.asarray(b)[..., None]
    for diag in range(ny + nz - 1):
        j = np.arange(max(0, diag - nz + 1), min(diag, ny - 1) + 1)
        k = diag - j
        aj = a * (j > 0)
        bk = b * (k > 0)
        up_j = x[..., np.maximum(j - 1, 0), k]
        up_k = x[..., j, np.maximum(k - 1, 0)]
        x[..., j, k] = (rhs[..., j, k] + aj * up_j + bk * up_k) / (1.0 + aj + bk)
    return x


class LateralTransport:
    """One lateral streaming substep of size dx over a full field."""

    def __init__(self, grids: Grids):
        self.grids = grids
        ang, s = grids.angular, grids.spatial
        umax = float(np.max(np.abs(ang.u_nodes)))
        vmax = float(np.max(np.abs(ang.v_nodes)))
        self._rate_sum = umax / s.dy + vmax / s.dz
        self._rate_max = max(umax / s.dy, vmax / s.dz)

    def courant(self, dx: float) -> float:
        """Reported Courant number: dx * max(max|u|/dy, max|v|/dz)."""
        return dx * self._rate_max

    def is_explicit(self, dx: float) -> bool:
        """Unsplit explicit update needs the summed rate below the limit."""
        return dx * self._rate_sum <= EXPLICIT_NU_LIMIT

    def step(self, data: np.ndarray, dx: float) -> np.ndarray:
        if self.is_explicit(dx):
            return data - dx * muscl_divergence(data, self.grids)
        return self._step_implicit(data, dx)

    def _step_implicit(self, data: np.ndarray, dx: float) -> np.ndarray:
        """Crank-Nicolson upwind with the limiter correction lagged.

        rhs = psi - dx D_muscl(psi) + (dx/2) A1 psi, then solve
        (I + dx/2 A1) psi_new = rhs quadrant by quadrant; axes are flipped
        so the sweep always runs toward increasing indices.
        """
        grids = self.grids
        rhs = data - dx * muscl_divergence(data, grids) \
            + 0.5 * dx * _upwind_divergence(data, grids)

        u_nodes = grids.angular.u_nodes
        v_nodes = grids.angular.v_nodes
        a_node = 0.5 * dx * np.abs(u_nodes) / grids.spatial.dy
        b_node = 0.5 * dx * np.abs(v_nodes) / grids.spatial.dz
        out = np.empty_like(data)
        for su, step_y in (((u_nodes >= 0), 1), ((u_nodes < 0), -1)):
            for sv, step_z in (((v_nodes >= 0), 1), ((v_nodes < 0), -1)):
                if not (su.any() and sv.any()):
                    continue
                iu, iv = np.where(su)[0], np.where(sv)[0]
                block = rhs[:, :, iu][:, :, :, iv][..., ::step_y, ::step_z]
                a = a_node[iu][None, None, :, None]
                b = b_node[iv][None, None, None, :]
                x = _sweep_quadrant(block, a, b)[..., ::step_y, ::step_z]
                out[np.ix_(range(data.shape[0]), range(2), iu, iv)] = x
        return out
