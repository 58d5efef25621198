"""INI configuration parsing, run assembly and output serialization."""

import json

import numpy as np
import pytest

from braggsolve.config import (CatastrophicSpec, RunSpec, _parse_material,
                               execute, load_config, prepare, write_outputs)
from braggsolve.beam import BeamSpec
from braggsolve.errors import ConfigError
from braggsolve.grids import EnergyGrid


MINIMAL_INI = """
[beam]
energy_mev = 50

[grid]
e_max_mev = 70
groups = 35
x_max_cm = 2.5
nx = 25
ny = 8
nz = 8
y_min_cm = -2
y_max_cm = 2
z_min_cm = -2
z_max_cm = 2
nu = 4
nv = 4

[run]
name = demo
spot_depths_cm = 0.5 1.5
"""


def write_ini(tmp_path, text=MINIMAL_INI):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return path


def test_load_config_minimal(tmp_path):
    spec = load_config(write_ini(tmp_path))
    assert spec.name == "demo"
    assert spec.beam.e0_mev == 50.0
    assert spec.grid_params["groups"] == 35
    assert spec.spot_depths_cm == (0.5, 1.5)
    assert spec.catastrophic is None
    assert spec.split == "strang"


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")


def test_load_config_bad_number(tmp_path):
    path = write_ini(tmp_path, "[beam]\nenergy_mev = fast\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_geometry_and_materials(tmp_path):
    text = MINIMAL_INI + """
[geometry]
background = water
box1 = air 1.0 1.5 -2 2 -2 2

[materials]
mylar = 1.4 H:0.0419 C:0.6250 O:0.3331
"""
    spec = load_config(write_ini(tmp_path, text))
    assert spec.boxes == (("air", 1.0, 1.5, -2.0, 2.0, -2.0, 2.0),)
    assert spec.extra_materials[0].name == "mylar"
    grids, density, tables, kernel = prepare(spec)
    assert kernel is None
    assert {m.name for m in density.materials} == {"water", "air"}


def test_load_config_catastrophic_section(tmp_path):
    text = MINIMAL_INI + """
[catastrophic]
enabled = true
sigma_ct_per_cm = 0.004
lambda_per_mev = 0.05
alpha = 2.0
beta = 30.0
max_order = 2
"""
    spec = load_config(write_ini(tmp_path, text))
    assert spec.max_order == 2
    assert spec.catastrophic.sigma_ct_per_cm == pytest.approx(0.004)


def test_parse_material_errors():
    with pytest.raises(ConfigError):
        _parse_material("m", "1.0")
    with pytest.raises(ConfigError):
        _parse_material("m", "1.0 Zz:1.0")
    with pytest.raises(ConfigError):
        _parse_material("m", "1.0 H0.5")


def test_catastrophic_spec_resolve_requires_parameters():
    grid = EnergyGrid.uniform(1.0, 11.0, 5)
    with pytest.raises(ConfigError):
        CatastrophicSpec(sigma_ct_per_cm=0.01).resolve(grid)
    params, sigma = CatastrophicSpec(
        sigma_ct_per_cm=0.01, lam=0.1, alpha=2.0, beta=20.0).resolve(grid)
    assert params.lam == 0.1
    assert np.allclose(sigma, 0.01)


def test_execute_and_write_outputs(tmp_path):
    config_path = write_ini(tmp_path)
    spec = load_config(config_path)
    out = execute(spec)
    outdir = tmp_path / "out"
    write_outputs(out, outdir, config_path=config_path)

    idd = np.genfromtxt(outdir / "idd.csv", delimiter=",", names=True)
    assert idd["x_cm"].size == 25
    assert np.allclose(idd["idd"], out.idd, rtol=1e-10)

    metrics = np.genfromtxt(outdir / "metrics.csv", delimiter=",",
                            names=True, dtype=None, encoding="utf-8")
    names = set(metrics["metric"].tolist())
    assert {"bragg_peak_cm", "p90_cm", "d90_cm", "d20_cm"} <= names
    assert "sigma_y_0.5cm" in names

    spot = np.genfromtxt(outdir / "spot_0.5cm.csv", delimiter=",", names=True)
    assert spot["dose"].size == 64

    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["name"] == "demo"
    assert manifest["budget"]["residual_rel"] < 1e-10
    assert manifest["config_sha256"]
    assert "numpy" in manifest["versions"]


def test_execute_rejects_unknown_background():
    spec = RunSpec(name="bad", beam=BeamSpec(e0_mev=50.0),
                   grid_params={"e_max": 70, "groups": 10, "x_max": 1.0,
                                "nx": 2, "ny": 4, "nz": 4, "nu": 4, "nv": 4},
                   background="vacuum")
    with pytest.raises(ConfigError):
        execute(spec)
