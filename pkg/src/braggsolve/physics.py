"""Proton-matter interaction coefficients.

Closed-form stopping power, energy-straggling coefficient and screened
elastic momentum-transfer cross section for elemental and compound
targets, plus multigroup table construction. All coefficients are
mass-normalized: stopping power in MeV cm^2/g, straggling in
MeV^2 cm^2/g, momentum transfer in rad^2 cm^2/g. Proton kinematics are
relativistic with m_p c^2 = 938.272 MeV.

The density-correction term of the stopping-power bracket is taken as
zero (sub-percent effect below 260 MeV) but can be supplied through
``delta_fn`` for studies that need it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .grids import EnergyGrid

# Constants (MeV, cm, g units)
PROTON_MASS_MEV = 938.272
ELECTRON_MASS_MEV = 0.511
ATOMIC_MASS_UNIT_MEV = 931.494
STOPPING_PREFACTOR = 0.307  # kappa, MeV cm^2/g (4 pi N_A r_e^2 m_e c^2)
FINE_STRUCTURE = 1.0 / 137.035999
HBARC_MEV_CM = 197.3269804e-13
AVOGADRO = 6.02214076e23


@dataclass(frozen=True)
class Element:
    """A chemical element: atomic number Z and molar mass A in g/mol."""

    symbol: str
    z: int
    a: float

    def __post_init__(self):
        if self.z < 1:
            raise ConfigError(f"atomic number must be >= 1, got {self.z}")
        if self.a <= 0:
            raise ConfigError(f"atomic mass must be positive, got {self.a}")


@dataclass(frozen=True)
class Material:
    """Target material: density and elemental composition by weight fraction."""

    name: str
    density: float  # g/cm^3
    components: tuple  # of (Element, weight fraction)

    def __post_init__(self):
        if self.density <= 0:
            raise ConfigError(f"density must be positive, got {self.density}")
        fracs = np.array([w for _, w in self.components])
        if len(fracs) == 0 or np.any(fracs <= 0) or np.any(fracs > 1):
            raise ConfigError("weight fractions must lie in (0, 1]")
        if abs(fracs.sum() - 1.0) > 1e-9:
            raise ConfigError(f"weight fractions sum to {fracs.sum()}, expected 1")


H = Element("H", 1, 1.008)
C = Element("C", 6, 12.011)
N = Element("N", 7, 14.007)
O = Element("O", 8, 15.999)
NA = Element("Na", 11, 22.990)
MG = Element("Mg", 12, 24.305)
P = Element("P", 15, 30.974)
S = Element("S", 16, 32.06)
AR = Element("Ar", 18, 39.948)
CA = Element("Ca", 20, 40.078)


def _normalized(pairs):
    total = sum(w for _, w in pairs)
    return tuple((e, w / total) for e, w in pairs)


WATER = Material("water", 1.000, _normalized([(H, 0.1111), (O, 0.8889)]))
BONE = Material(
    "bone",
    1.757,
    _normalized(
        [
            (H, 0.04200),
            (C, 0.1940),
            (N, 0.04000),
            (O, 0.4250),
            (NA, 0.001000),
            (MG, 0.002000),
            (P, 0.09200),
            (S, 0.003000),
            (CA, 0.2010),
        ]
    ),
)
# The published air fractions sum to 1.0000548; renormalized here to
# satisfy the unit-sum invariant.
AIR = Material(
    "air",
    0.001205,
    _normalized([(C, 0.0001248), (N, 0.7553), (O, 0.2318), (AR, 0.01283)]),
)

PRESET_MATERIALS = {m.name: m for m in (WATER, BONE, AIR)}


def ionisation_potential(z: int) -> float:
    """Mean ionisation potential in eV for atomic number z."""
    if z < 1:
        raise ConfigError(f"atomic number must be >= 1, got {z}")
    if z == 1:
        return 19.0
    if z <= 13:
        return 11.2 + 11.7 * z
    return 52.8 + 8.71 * z


def _kinematics(e_mev):
    """Relativistic beta^2 and gamma for a proton of kinetic energy e_mev."""
    e = np.asarray(e_mev, dtype=float)
    gamma = (e + PROTON_MASS_MEV) / PROTON_MASS_MEV
    beta2 = 1.0 - 1.0 / gamma**2
    return beta2, gamma


def _bethe_bracket(z, e_mev, delta_fn=None):
    beta2, gamma = _kinematics(e_mev)
    i_mev = ionisation_potential(z) * 1e-6
    delta = delta_fn(e_mev) if delta_fn is not None else 0.0
    return np.log(2.0 * ELECTRON_MASS_MEV * beta2 * gamma**2 / i_mev) - beta2 - delta / 2.0


def _stopping_element(element: Element, e_mev, delta_fn=None):
    beta2, _ = _kinematics(e_mev)
    bracket = _bethe_bracket(element.z, e_mev, delta_fn)
    return STOPPING_PREFACTOR * (element.z / element.a) / beta2 * bracket


def stopping_power(material: Material, e_mev, delta_fn=None, diagnostics=None):
    """Mass stopping power in MeV cm^2/g; weight-fraction convex combination.

    Below the (sub-MeV) energy where the Bethe bracket of any constituent
    turns negative, the value is frozen at the lowest energy where all
    brackets are positive. When ``diagnostics`` is a dict, the number of
    clamped evaluations is recorded under "clamped".
    """
    e = np.asarray(e_mev, dtype=float)
    scalar = e.ndim == 0
    e = np.atleast_1d(e)

    brackets = np.stack([_bethe_bracket(el.z, e, delta_fn) for el, _ in material.components])
    bad = np.any(brackets <= 0.0, axis=0)
    if np.any(bad):
        e_floor = _positive_bracket_floor(material, delta_fn)
        e = np.where(bad, e_floor, e)
        if diagnostics is not None:
            diagnostics["clamped"] = diagnostics.get("clamped", 0) + int(bad.sum())

    s = sum(w * _stopping_element(el, e, delta_fn) for el, w in material.components)
    return float(s[0]) if scalar else s


def _positive_bracket_floor(material: Material, delta_fn=None) -> float:
    """Smallest energy (MeV) at which every constituent bracket is positive."""
    from scipy.optimize import brentq

    floor = 0.0
    for el, _ in material.components:
        f = lambda e: _bethe_bracket(el.z, e, delta_fn)
        if f(1e-4) > 0:
            continue
        floor = max(floor, brentq(f, 1e-4, 10.0))
    return floor * (1.0 + 1e-9) if floor > 0 else 1e-4


def straggling_coefficient(material: Material, e_mev):
    """Energy-straggling coefficient T in MeV^2 cm^2/g.

    Binding-corrected form scaled by the per-mass electron density
    N_A Z / A, which turns the 4 pi e^4 prefactor into kappa (Z/A) m_e c^2.
    The binding correction is clipped at zero so T stays positive at the
    very lowest energies.
    """
    e = np.asarray(e_mev, dtype=float)
    beta2, _ = _kinematics(e)
    t = 0.0
    for el, w in material.components:
        i_mev = ionisation_potential(el.z) * 1e-6
        me_v2 = ELECTRON_MASS_MEV * beta2
        corr = (4.0 * i_mev) / (3.0 * me_v2) * np.log(2.0 * me_v2 / i_mev)
        corr = np.maximum(corr, 0.0)
        t = t + w * STOPPING_PREFACTOR * (el.z / el.a) * ELECTRON_MASS_MEV * (1.0 + corr)
    return t


def momentum_transfer_xs(material: Material, e_mev):
    """Screened-Rutherford momentum-transfer cross section, rad^2 cm^2/g.

    eta = (Z^(1/3) alpha m_e c / p)^2 screens the mu -> 1 divergence; the
    Rutherford length scale uses the reduced proton-nucleus mass and the
    relativistic proton speed. Per-atom values are scaled by N_A / A.
    """
    e = np.asarray(e_mev, dtype=float)
    beta2, _ = _kinematics(e)
    pc = np.sqrt(e * (e + 2.0 * PROTON_MASS_MEV))  # MeV
    sigma = 0.0
    for el, w in material.components:
        m_target = el.a * ATOMIC_MASS_UNIT_MEV
        m_reduced = PROTON_MASS_MEV * m_target / (PROTON_MASS_MEV + m_target)
        b = el.z * FINE_STRUCTURE * HBARC_MEV_CM / (m_reduced * beta2)  # cm
        eta = (el.z ** (1.0 / 3.0) * FINE_STRUCTURE * ELECTRON_MASS_MEV / pc) ** 2
        per_atom = 2.0 * np.pi * b**2 * (np.log((eta + 1.0) / eta) - 1.0 / (eta + 1.0))
        sigma = sigma + w * per_atom * AVOGADRO / el.a
    return sigma


@dataclass(frozen=True)
class PhysicsTables:
    """Group-resolved coefficients for one material on one energy grid.

    s_edges holds S at the G+1 group edges, t_centers and sigma_tr_g are
    per-group (centers / averages), sigma_ct_g is the catastrophic total
    cross section in 1/cm (already density-scaled; zero disables it).
    """

    material: Material
    grid: EnergyGrid
    s_edges: np.ndarray
    t_centers: np.ndarray
    sigma_tr_g: np.ndarray
    sigma_ct_g: np.ndarray

    def __post_init__(self):
        g = self.grid.n_groups
        if self.s_edges.shape != (g + 1,) or self.t_centers.shape != (g,):
            raise DataError("physics table shapes inconsistent with energy grid")
        if self.sigma_tr_g.shape != (g,) or self.sigma_ct_g.shape != (g,):
            raise DataError("physics table shapes inconsistent with energy grid")
        for arr in (self.s_edges, self.t_centers, self.sigma_tr_g, self.sigma_ct_g):
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise DataError("physics tables must be finite and nonnegative")


def build_tables(material: Material, grid: EnergyGrid, sigma_ct_g=None,
                 delta_fn=None) -> PhysicsTables:
    """Sample and group-average the coefficients onto an energy grid.

    S is sampled at group edges, T at group centers; sigma_tr is averaged
    per group with composite Simpson on 4 subintervals (smooth integrand,
    second order is ample).
    """
    s_edges = np.asarray(stopping_power(material, grid.edges, delta_fn))
    t_centers = np.asarray(straggling_coefficient(material, grid.centers))

    # Simpson weights on 5 equidistant points per group.
    frac = np.linspace(0.0, 1.0, 5)
    pts = grid.edges[:-1, None] + grid.widths[:, None] * frac[None, :]
    vals = momentum_transfer_xs(material, pts.ravel()).reshape(pts.shape)
    wsimp = np.array([1.0, 4.0, 2.0, 4.0, 1.0]) / 12.0
    sigma_tr_g = vals @ wsimp

    if sigma_ct_g is None:
        sigma_ct_g = np.zeros(grid.n_groups)
    else:
        sigma_ct_g = np.asarray(sigma_ct_g, dtype=float)
    return PhysicsTables(material, grid, s_edges, t_centers, sigma_tr_g, sigma_ct_g)


def csda_range(material: Material, e0_mev: float, e_min_mev: float = 1.0) -> float:
    """Continuous-slowing-down range in cm: integral of dE / (rho S(E))."""
    from scipy.integrate import quad

    val, _ = quad(
        lambda e: 1.0 / (material.density * stopping_power(material, e)),
        e_min_mev,
        e0_mev,
        limit=200,
    )
    return val
