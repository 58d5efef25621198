"""Depth sweep: operator splitting over slabs with energy bookkeeping.

Each slab advances every scatter order through an energy substep
(slowing down, straggling, removal), an angular diffusion substep and a
lateral streaming substep. The default composition is symmetric
(Strang): half energy, half angular, full lateral, half angular, half
energy, which is second order in the slab thickness. The alternative
"lie" composition applies each operator once per slab and is first order.

Scatter orders march in lockstep: the re-injection source feeding order
k during slab s is evaluated from order k-1 as it entered the slab, so a
single pass over depth resolves every order without storing per-slab
fields.

The energy budget telescopes exactly. Every substep is bracketed by
evaluations of the discrete energy functional, and each difference is
attributed to exactly one bucket: energy-substep losses become voxel
deposits (this includes drift below the grid floor and, for the last
order, unre-injected removal), angular-substep losses are absorption at
the angular box boundary, lateral losses are escape through the lateral
walls. Whatever remains in the fields after the last slab is counted as
exiting flux, so incident = deposited + escapes + exiting holds to
rounding error by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .angular_diffusion import AngularDiffusion
from .beam import BeamSpec, incident_field
from .catastrophic import CatastrophicKernel
from .energy_dg import StepperCache
from .errors import ConfigError
from .grids import DensityField, Grids, PhaseSpaceField, field_moment
from .lateral_transport import LateralTransport
from .parallel import map_chunks
from .physics import PhysicsTables
from .tally import DoseTally


@dataclass
class TransportResult:
    tally: DoseTally
    budget: dict
    traces: np.ndarray | None = None
    diagnostics: dict = dc_field(default_factory=dict)
    exit_fields: list | None = None


def _eflux_weights(grids: Grids) -> np.ndarray:
    """(G, 2) weights turning summed coefficients into an energy flux."""
    e = grids.energy
    w = np.empty((e.n_groups, 2))
    w[:, 0] = e.centers * e.widths
    w[:, 1] = e.widths**2 / 6.0
    return w * grids.cell_measure


def _energy_columns(data: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Per-column energy flux, shape (n_y, n_z)."""
    return np.einsum("gl,gluvyz->yz", w, data, optimize=True)


def run_transport(
    grids: Grids,
    beam: BeamSpec,
    density: DensityField,
    tables: list,
    *,
    kernel: CatastrophicKernel | None = None,
    max_order: int = 0,
    split: str = "strang",
    workers: int = 1,
    trace: bool = False,
    keep_exit: bool = False,
) -> TransportResult:
    """Sweep the beam through the geometry and tally dose.

    ``tables`` holds one PhysicsTables per material in ``density``; all
    must share the energy grid of ``grids``. ``max_order`` is the highest
    scatter order carried (0 = primary only). ``kernel`` supplies the
    re-injection source; removal itself is governed by the sigma_ct
    column of the tables, so a nonzero sigma_ct with max_order = 0 means
    removed particles deposit where they were removed.
    """
    if split not in ("strang", "lie"):
        raise ConfigError(f"unknown splitting {split!r}")
    if len(tables) != len(density.materials):
        raise ConfigError("need one physics table per material")
    for t in tables:
        if t.grid is not grids.energy and t.grid.n_groups != grids.energy.n_groups:
            raise ConfigError("physics tables built on a different energy grid")
    if max_order > 0 and kernel is None:
        raise ConfigError("scatter orders beyond the primary need a kernel")

    spatial = grids.spatial
    n_groups = grids.energy.n_groups
    dx = spatial.dx
    w_e = _eflux_weights(grids)

    fields = [PhaseSpaceField(grids) for _ in range(max_order + 1)]
    fields[0] = incident_field(grids, beam)

    lateral = LateralTransport(grids)
    angulars = [AngularDiffusion(grids, t.sigma_tr_g) for t in tables]
    cache = StepperCache()

    tally = DoseTally(spatial)
    incident = sum(field_moment(f)[1] for f in fields)
    lateral_escape = 0.0
    angular_escape = 0.0

    traces = np.zeros((spatial.n_x, n_groups, 2)) if trace else None

    if split == "strang":
        h_e, h_a = 0.5 * dx, 0.5 * dx
        stages = ("E", "A", "L", "A", "E")
    else:
        h_e, h_a = dx, dx
        stages = ("E", "A", "L")

    for s in range(spatial.n_x):
        mat_idx, _ = density.slab(s)
        col_groups = _column_groups(mat_idx)

        if kernel is not None and max_order > 0:
            sources = [None] + [kernel.source(fields[k - 1].data)
                                for k in range(1, max_order + 1)]
        else:
            sources = [None] * (max_order + 1)

        dep_cols = np.zeros((spatial.n_y, spatial.n_z))
        for k, f in enumerate(fields):
            for stage in stages:
                if stage == "E":
                    before = _energy_columns(f.data, w_e)
                    _energy_stage(f.data, sources[k], h_e, col_groups,
                                  tables, density, cache, workers)
                    dep_cols += before - _energy_columns(f.data, w_e)
                elif stage == "A":
                    before = float(np.einsum("gl,gluvyz->", w_e, f.data))
                    _angular_stage(f.data, h_a, col_groups, angulars,
                                   density, workers)
                    angular_escape += before - float(
                        np.einsum("gl,gluvyz->", w_e, f.data))
                else:
                    before = float(np.einsum("gl,gluvyz->", w_e, f.data))
                    f.data = _lateral_stage(f.data, lateral, dx, workers)
                    lateral_escape += before - float(
                        np.einsum("gl,gluvyz->", w_e, f.data))

        tally.add_slab(s, dep_cols)
        if trace:
            total = sum(f.data.sum(axis=(2, 3, 4, 5)) for f in fields)
            traces[s] = total * grids.cell_measure

    exiting = sum(field_moment(f)[1] for f in fields)
    deposited = float(tally.edep.sum())
    residual = incident - deposited - lateral_escape - angular_escape - exiting
    budget = {
        "incident_mev": incident,
        "deposited_mev": deposited,
        "lateral_escape_mev": lateral_escape,
        "angular_escape_mev": angular_escape,
        "exiting_mev": exiting,
        "residual_rel": abs(residual) / incident if incident > 0 else 0.0,
    }
    diagnostics = {
        "courant": lateral.courant(dx),
        "explicit_lateral": lateral.is_explicit(dx),
        "split": split,
        "max_order": max_order,
    }
    return TransportResult(
        tally=tally,
        budget=budget,
        traces=traces,
        diagnostics=diagnostics,
        exit_fields=fields if keep_exit else None,
    )


def _column_groups(mat_idx: np.ndarray):
    """Flat column indices per material present in the slab."""
    flat = mat_idx.ravel()
    uniq = np.unique(flat)
    if uniq.size == 1:
        return [(int(uniq[0]), None)]  # None marks "all columns"
    return [(int(m), np.where(flat == m)[0]) for m in uniq]


def _energy_stage(data, src, h, col_groups, tables, density, cache, workers):
    g2 = data.shape[0] * 2
    n_ang = data.shape[2] * data.shape[3]
    flat = data.reshape(g2, n_ang, -1)
    src_flat = None if src is None else src.reshape(g2, n_ang, -1)
    for mi, cols in col_groups:
        stepper = cache.get(tables[mi], density.materials[mi].density, h)
        if cols is None:
            block = flat.reshape(g2, -1)
            sblock = None if src_flat is None else src_flat.reshape(g2, -1)
            out = np.empty_like(block)

            def work(lo, hi, block=block, sblock=sblock, out=out, st=stepper):
                out[:, lo:hi] = st.step(
                    block[:, lo:hi],
                    None if sblock is None else sblock[:, lo:hi],
                )

            map_chunks(work, block.shape[1], workers)
            flat[:] = out.reshape(flat.shape)
        else:
            block = flat[:, :, cols].reshape(g2, -1)
            sblock = None if src_flat is None else src_flat[:, :, cols].reshape(g2, -1)
            flat[:, :, cols] = stepper.step(block, sblock).reshape(g2, n_ang, -1)


def _angular_stage(data, h, col_groups, angulars, density, workers):
    for mi, cols in col_groups:
        ang = angulars[mi]
        rho = density.materials[mi].density
        if cols is None:
            def work(lo, hi, ang=ang, rho=rho):
                data[lo:hi] = ang.step(data[lo:hi], rho, h, group_offset=lo)

            map_chunks(work, data.shape[0], workers)
        else:
            flat = data.reshape(data.shape[:4] + (-1,))
            flat[..., cols] = ang.step(flat[..., cols], rho, h)


def _lateral_stage(data, lateral, dx, workers):
    out = np.empty_like(data)

    def work(lo, hi):
        out[lo:hi] = lateral.step(data[lo:hi], dx)

    map_chunks(work, data.shape[0], workers)
    return out
