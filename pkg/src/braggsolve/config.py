"""Run specification: INI config parsing, scenario assembly, output writing.

A run is described by an INI file with sections [beam], [grid],
[geometry], [materials], [catastrophic], [split] and [run]; every key has
a default, so a minimal config only sets the beam energy. ``load_config``
turns a file into a RunSpec, ``execute`` runs it, and ``write_outputs``
serializes the results as delimited text plus a JSON manifest.

Output files (all floats printed with %.12g):
  idd.csv       x_cm,idd            laterally integrated dose, MeV cm^2/g
  ld.csv        x_cm,y_cm,dose      z-integrated dose map, MeV cm/g
  spot_<d>.csv  y_cm,z_cm,dose      lateral dose slice at depth d cm
  metrics.csv   metric,value        peak/P90/D90/D20 depths, spot sigmas
  manifest.json                     budget, config hash, library versions
"""

from __future__ import annotations

import configparser
import hashlib
import json
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import catastrophic as cata
from .beam import BeamSpec
from .driver import TransportResult, run_transport
from .errors import ConfigError
from .grids import DensityField, Grids, build_density_field, make_grids
from .physics import PRESET_MATERIALS, Element, Material, build_tables
from .tally import (depth_metrics, integrated_depth_dose, longitudinal_dose,
                    spot_sigma)

FMT = "%.12g"


@dataclass(frozen=True)
class CatastrophicSpec:
    """Either explicit kernel parameters or files to fit/load them from."""

    sigma_ct_per_cm: float = 0.0
    sigma_ct_file: str | None = None
    lam: float | None = None
    alpha: float | None = None
    beta: float | None = None
    trajectory_file: str | None = None

    def resolve(self, energy_grid):
        """Return (KernelParams, sigma_ct_g array)."""
        if self.trajectory_file is not None:
            losses, thetas = cata.read_trajectories(self.trajectory_file)
            params = cata.fit_kernel(losses, thetas)
        else:
            if None in (self.lam, self.alpha, self.beta):
                raise ConfigError(
                    "catastrophic kernel needs lambda/alpha/beta or a trajectory file")
            params = cata.KernelParams(self.lam, self.alpha, self.beta)
        if self.sigma_ct_file is not None:
            sigma = cata.read_sigma_ct(self.sigma_ct_file, energy_grid)
        else:
            sigma = np.full(energy_grid.n_groups, float(self.sigma_ct_per_cm))
        return params, sigma


@dataclass(frozen=True)
class RunSpec:
    name: str
    beam: BeamSpec
    grid_params: dict
    background: str = "water"
    boxes: tuple = ()
    extra_materials: tuple = ()  # of Material
    catastrophic: CatastrophicSpec | None = None
    max_order: int = 0
    split: str = "strang"
    spot_depths_cm: tuple = ()
    workers: int = 1

    def grids(self) -> Grids:
        return make_grids(self.grid_params)

    def materials(self) -> dict:
        mats = dict(PRESET_MATERIALS)
        for m in self.extra_materials:
            mats[m.name] = m
        return mats


def _parse_material(name: str, text: str) -> Material:
    """Parse 'density SYM:frac SYM:frac ...' into a Material."""
    from . import physics

    parts = text.split()
    if len(parts) < 2:
        raise ConfigError(f"material {name!r} needs a density and components")
    comps = []
    known = {e.symbol: e for e in vars(physics).values() if isinstance(e, Element)}
    for tok in parts[1:]:
        if ":" not in tok:
            raise ConfigError(f"bad component {tok!r} in material {name!r}")
        sym, frac = tok.split(":", 1)
        if sym not in known:
            raise ConfigError(f"unknown element {sym!r} in material {name!r}")
        comps.append((known[sym], float(frac)))
    return Material(name, float(parts[0]), tuple(comps))


def load_config(path) -> RunSpec:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")

    def get(section, key, default, cast=float):
        if cp.has_option(section, key):
            try:
                return cast(cp.get(section, key))
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from exc
        return default

    beam = BeamSpec(
        e0_mev=get("beam", "energy_mev", 100.0),
        sigma_e=get("beam", "sigma_e_mev", 1.0),
        sigma_y=get("beam", "sigma_y_cm", 0.3),
        sigma_z=get("beam", "sigma_z_cm", 0.3),
        sigma_u=get("beam", "sigma_u", 1e-6),
        sigma_v=get("beam", "sigma_v", 1e-6),
    )
    grid_params = {
        "e_min": get("grid", "e_min_mev", 1.0),
        "e_max": get("grid", "e_max_mev", 260.0),
        "groups": get("grid", "groups", 500, int),
        "x_max": get("grid", "x_max_cm", 40.0),
        "nx": get("grid", "nx", 4000, int),
        "y_min": get("grid", "y_min_cm", -4.0),
        "y_max": get("grid", "y_max_cm", 4.0),
        "ny": get("grid", "ny", 80, int),
        "z_min": get("grid", "z_min_cm", -4.0),
        "z_max": get("grid", "z_max_cm", 4.0),
        "nz": get("grid", "nz", 80, int),
        "nu": get("grid", "nu", 20, int),
        "nv": get("grid", "nv", 20, int),
    }

    extra = []
    if cp.has_section("materials"):
        for name in cp.options("materials"):
            extra.append(_parse_material(name, cp.get("materials", name)))
    background = get("geometry", "background", "water", str)
    boxes = []
    if cp.has_section("geometry"):
        for key in cp.options("geometry"):
            if not key.startswith("box"):
                continue
            parts = cp.get("geometry", key).split()
            if len(parts) != 7:
                raise ConfigError(f"[geometry] {key}: expected 'material x0 x1 y0 y1 z0 z1'")
            boxes.append((parts[0],) + tuple(float(p) for p in parts[1:]))

    cat = None
    max_order = 0
    if get("catastrophic", "enabled", False, lambda s: s.lower() in ("1", "true", "yes")):
        opt = lambda k: (float(cp.get("catastrophic", k))
                         if cp.has_option("catastrophic", k) else None)
        cat = CatastrophicSpec(
            sigma_ct_per_cm=get("catastrophic", "sigma_ct_per_cm", 0.0),
            sigma_ct_file=get("catastrophic", "sigma_ct_file", None, str),
            lam=opt("lambda_per_mev"),
            alpha=opt("alpha"),
            beta=opt("beta"),
            trajectory_file=get("catastrophic", "trajectory_file", None, str),
        )
        max_order = get("catastrophic", "max_order", 1, int)

    spot = get("run", "spot_depths_cm", "", str)
    spot_depths = tuple(float(t) for t in spot.split()) if spot.strip() else ()

    return RunSpec(
        name=get("run", "name", "run", str),
        beam=beam,
        grid_params=grid_params,
        background=background,
        boxes=tuple(boxes),
        extra_materials=tuple(extra),
        catastrophic=cat,
        max_order=max_order,
        split=get("split", "scheme", "strang", str),
        spot_depths_cm=spot_depths,
        workers=get("run", "workers", 1, int),
    )


@dataclass
class RunOutputs:
    spec: RunSpec
    result: TransportResult
    dose: np.ndarray  # (n_x, n_y, n_z), MeV/g per proton
    idd: np.ndarray  # (n_x,)
    metrics: dict
    density: DensityField


def prepare(spec: RunSpec):
    """Assemble grids, geometry, tables and kernel for a run."""
    grids = spec.grids()
    mats = spec.materials()
    if spec.background not in mats:
        raise ConfigError(f"unknown background material {spec.background!r}")
    density = build_density_field(grids.spatial, mats, spec.background, spec.boxes)

    kernel = None
    sigma_ct = None
    if spec.catastrophic is not None:
        params, sigma_ct = spec.catastrophic.resolve(grids.energy)
        kernel = cata.CatastrophicKernel(grids, params, sigma_ct)

    tables = [build_tables(m, grids.energy, sigma_ct) for m in density.materials]
    return grids, density, tables, kernel


def execute(spec: RunSpec, *, trace: bool = False, workers: int | None = None) -> RunOutputs:
    grids, density, tables, kernel = prepare(spec)
    result = run_transport(
        grids,
        spec.beam,
        density,
        tables,
        kernel=kernel,
        max_order=spec.max_order,
        split=spec.split,
        workers=spec.workers if workers is None else workers,
        trace=trace,
    )
    dose = result.tally.dose(density)
    idd = integrated_depth_dose(dose, grids.spatial)
    metrics = _collect_metrics(spec, grids, dose, idd)
    return RunOutputs(spec, result, dose, idd, metrics, density)


def _collect_metrics(spec: RunSpec, grids: Grids, dose, idd) -> dict:
    s = grids.spatial
    dm = depth_metrics(idd, s.x_slabs)
    metrics = {
        "bragg_peak_cm": dm.bragg_peak_cm,
        "p90_cm": dm.p90_cm,
        "d90_cm": dm.d90_cm,
        "d20_cm": dm.d20_cm,
    }
    for depth in spec.spot_depths_cm:
        i = min(int(depth / s.dx), s.n_x - 1)
        sy, sz = spot_sigma(dose[i], s.y_centers, s.z_centers)
        metrics[f"sigma_y_{depth:g}cm"] = sy
        metrics[f"sigma_z_{depth:g}cm"] = sz
    return metrics


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(FMT % v if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def config_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_outputs(out: RunOutputs, outdir, config_path=None):
    """Write the delimited outputs and the manifest into ``outdir``."""
    import pathlib

    outdir = pathlib.Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grids = out.spec.grids()
    s = grids.spatial

    _write_csv(outdir / "idd.csv", "x_cm,idd",
               zip(s.x_slabs.tolist(), out.idd.tolist()))

    ld = longitudinal_dose(out.dose, s)
    rows = [
        (float(x), float(y), float(ld[i, j]))
        for i, x in enumerate(s.x_slabs.tolist())
        for j, y in enumerate(s.y_centers.tolist())
    ]
    _write_csv(outdir / "ld.csv", "x_cm,y_cm,dose", rows)

    for depth in out.spec.spot_depths_cm:
        i = min(int(depth / s.dx), s.n_x - 1)
        rows = [
            (float(y), float(z), float(out.dose[i, j, k]))
            for j, y in enumerate(s.y_centers.tolist())
            for k, z in enumerate(s.z_centers.tolist())
        ]
        _write_csv(outdir / f"spot_{depth:g}cm.csv", "y_cm,z_cm,dose", rows)

    _write_csv(outdir / "metrics.csv", "metric,value",
               [(k, float(v)) for k, v in out.metrics.items()])

    manifest = {
        "name": out.spec.name,
        "budget": out.result.budget,
        "diagnostics": {k: (bool(v) if isinstance(v, np.bool_) else v)
                        for k, v in out.result.diagnostics.items()},
        "config_sha256": config_digest(config_path) if config_path else None,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
    }
    import scipy

    manifest["versions"]["scipy"] = scipy.__version__
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def with_workers(spec: RunSpec, workers: int) -> RunSpec:
    return replace(spec, workers=workers)
