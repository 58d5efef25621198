"""DG energy discretization of slowing down, straggling and removal.

Groups are indexed by ascending energy with two local modes per group:
psi1 (group mean) and psi2, the coefficient of phi2 = 2 (E - E_c) / dE.
Slowing down moves particles toward lower group indices, so the upwind
trace at an interior edge is taken from the higher-energy side, where it
evaluates to mu_k = psi1_k - psi2_k. Straggling uses an interior-penalty
form with penalty factor ALPHA; both penalty and flux terms are dropped
at the two boundary edges, which makes the lowest edge purely advective:
whatever drifts below the grid floor is treated as locally deposited.

Depth stepping is Crank-Nicolson. The one-group system matrix depends
only on (material tables, density, step size), so its LU factorization is
cached and reused across slabs and scatter orders.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csc_matrix, identity

from .errors import NumericalError
from .physics import PhysicsTables

ALPHA = 2.0  # interior penalty factor


def apply_operator(psi1, psi2, tables: PhysicsTables, rho: float):
    """Right-hand side d(psi1, psi2)/dx of the energy subsystem.

    psi1, psi2 have shape (G, ...); coefficients broadcast over trailing
    axes. Returns (dpsi1, dpsi2) with the same shapes. This routine is the
    single authoritative transcription of the scheme; the sparse stepping
    matrix is generated from it by application to unit vectors.
    """
    grid = tables.grid
    de = grid.widths
    su = tables.s_edges
    tc = tables.t_centers
    sig = tables.sigma_ct_g

    trail = psi1.ndim - 1
    col = lambda a: a.reshape(a.shape + (1,) * trail)

    mu = psi1 - psi2
    zero = np.zeros_like(mu[:1])
    mu_up = np.concatenate([mu[1:], zero])  # mu_{k+1}, zero inflow at the top

    # Mirrored center values so the one-sided T differences vanish at the ends.
    tcx = np.concatenate([tc[:1], tc, tc[-1:]])
    d_up = tcx[2:] - tcx[1:-1]  # T_{k+1} - T_k
    d_dn = tcx[1:-1] - tcx[:-2]  # T_k - T_{k-1}
    d_wide = tcx[2:] - tcx[:-2]

    # Edge arrays, index e = 0..G; boundary edges carry no penalty flux.
    t_edge = np.concatenate([tc[:1], 0.5 * (tc[:-1] + tc[1:]), tc[-1:]])
    f_edge = np.zeros((grid.n_groups + 1,) + mu.shape[1:])
    j_edge = np.zeros_like(f_edge)
    f_edge[1:-1] = col(t_edge[1:-1]) * (psi2[:-1] / col(de[:-1]) + psi2[1:] / col(de[1:]))
    j_edge[1:-1] = (psi1[:-1] + psi2[:-1]) - (psi1[1:] - psi2[1:])

    q1 = (f_edge[1:] - f_edge[:-1] - ALPHA * (j_edge[1:] - j_edge[:-1])) / col(de)
    q2 = 3.0 / col(de) * (
        f_edge[1:] + f_edge[:-1]
        + (col(t_edge[1:]) * j_edge[1:] + col(t_edge[:-1]) * j_edge[:-1]) / col(de)
        - ALPHA * (j_edge[1:] + j_edge[:-1])
        - 4.0 * col(tc) * psi2 / col(de)
    )

    adv_up = col(rho * su[1:] / de) * mu_up
    adv_dn = col(rho * su[:-1] / de) * mu
    drift_up = col(0.5 * rho * d_up / de**2) * mu_up
    drift_dn = col(0.5 * rho * d_dn / de**2) * mu

    dpsi1 = adv_up - adv_dn - col(sig) * psi1 + drift_up - drift_dn + 0.5 * rho * q1

    # The lower-edge fluxes enter the slope equation with a plus sign:
    # phi2 = -1 at the lower edge and the boundary bracket subtracts it.
    dpsi2 = (
        3.0 * (adv_up + adv_dn)
        - col(3.0 * rho * (su[1:] + su[:-1]) / de) * psi1
        - col(rho * (su[1:] - su[:-1]) / de) * psi2
        - col(sig) * psi2
        + 3.0 * (drift_up + drift_dn)
        - col(1.5 * rho * d_wide / de**2) * psi1
        + 0.5 * rho * q2
    )
    return dpsi1, dpsi2


def operator_matrix(tables: PhysicsTables, rho: float) -> csc_matrix:
    """Dense assembly of the 2G x 2G operator, returned sparse.

    Unknowns are interleaved (psi1_0, psi2_0, psi1_1, ...). The operator
    couples nearest-neighbour groups only, so the matrix is 7-banded.
    """
    g = tables.grid.n_groups
    eye = np.eye(2 * g)
    p1 = eye.reshape(g, 2, 2 * g)[:, 0]
    p2 = eye.reshape(g, 2, 2 * g)[:, 1]
    d1, d2 = apply_operator(p1, p2, tables, rho)
    dense = np.empty((2 * g, 2 * g))
    dense[0::2] = d1
    dense[1::2] = d2
    dense[np.abs(dense) < 1e-300] = 0.0
    return csc_matrix(dense)


BANDWIDTH = 3  # interleaved (psi1, psi2) unknowns couple across +-3 positions


class EnergyStepper:
    """Crank-Nicolson depth stepper for the energy subsystem.

    The system matrix (I - h/2 L) is 7-banded in the interleaved unknown
    ordering, so each step is one LAPACK banded solve over a (2G, m) block
    of phase-space columns.
    """

    def __init__(self, tables: PhysicsTables, rho: float, h: float):
        self.tables = tables
        self.rho = rho
        self.h = h
        lop = operator_matrix(tables, rho)
        n = lop.shape[0]
        eye = identity(n, format="csc")
        a = (eye - 0.5 * h * lop).toarray()
        self._ab = np.zeros((2 * BANDWIDTH + 1, n))
        for off in range(-BANDWIDTH, BANDWIDTH + 1):
            diag = np.diagonal(a, off)
            row = BANDWIDTH - off
            if off >= 0:
                self._ab[row, off:] = diag
            else:
                self._ab[row, :off] = diag
        self._b = (eye + 0.5 * h * lop).tocsr()

    def step(self, psi: np.ndarray, src: np.ndarray | None = None) -> np.ndarray:
        """Advance psi (shape (2G, m)) by one depth increment h.

        src, if given, is a constant-in-x inhomogeneity with the same shape,
        integrated with the trapezoidal weight h implied by Crank-Nicolson.
        """
        from scipy.linalg import solve_banded

        rhs = self._b @ psi
        if src is not None:
            rhs += self.h * src
        # LAPACK wants column-major right-hand sides; converting once here
        # is cheaper than the implicit copy inside solve_banded.
        rhs = np.asfortranarray(rhs)
        out = solve_banded((BANDWIDTH, BANDWIDTH), self._ab, rhs,
                           check_finite=False, overwrite_b=True)
        if not np.all(np.isfinite(out)):
            raise NumericalError("energy substep produced non-finite values")
        return out


class StepperCache:
    """Memoizes EnergySteppers keyed by (material name, density, step)."""

    def __init__(self):
        self._cache = {}

    def get(self, tables: PhysicsTables, rho: float, h: float) -> EnergyStepper:
        key = (tables.material.name, id(tables), float(rho), float(h))
        st = self._cache.get(key)
        if st is None:
            st = EnergyStepper(tables, rho, h)
            self._cache[key] = st
        return st
