"""Viz package: loaders, renderers, slope fit and CLI on synthetic CSVs."""

import numpy as np
import pytest

from braggviz import PlotSpec, VizError, render
from braggviz.cli import main
from braggviz.plots import fitted_order, load_convergence, load_idd


@pytest.fixture
def outputs_dir(tmp_path):
    """A synthetic solver output directory with every consumed CSV."""
    x = np.linspace(0.05, 2.45, 25)
    idd = 1.0 + 4.0 * np.exp(-0.5 * ((x - 2.0) / 0.15) ** 2)
    with open(tmp_path / "idd.csv", "w") as fh:
        fh.write("x_cm,idd\n")
        for xi, di in zip(x, idd):
            fh.write(f"{xi},{di}\n")

    with open(tmp_path / "metrics.csv", "w") as fh:
        fh.write("metric,value\n")
        for name, val in (("bragg_peak_cm", 2.0), ("p90_cm", 1.8),
                          ("d90_cm", 2.2), ("d20_cm", 2.35),
                          ("sigma_y_1cm", 0.31)):
            fh.write(f"{name},{val}\n")

    y = np.linspace(-1.75, 1.75, 8)
    with open(tmp_path / "ld.csv", "w") as fh:
        fh.write("x_cm,y_cm,dose\n")
        for xi in x:
            for yi in y:
                fh.write(f"{xi},{yi},{np.exp(-yi * yi) * (1 + xi)}\n")

    z = y
    with open(tmp_path / "spot_1cm.csv", "w") as fh:
        fh.write("y_cm,z_cm,dose\n")
        for yi in y:
            for zi in z:
                fh.write(f"{yi},{zi},{np.exp(-(yi * yi + zi * zi))}\n")

    h = np.array([0.04, 0.02, 0.01])
    with open(tmp_path / "convergence.csv", "w") as fh:
        fh.write("axis,h,err1,err2\n")
        for axis, p1, p2 in (("depth", 2.0, 1.9), ("energy", 2.6, 2.1)):
            for hi in h:
                fh.write(f"{axis},{hi},{3.0 * hi**p1},{2.0 * hi**p2}\n")
    return tmp_path


def test_render_all_four_kinds(outputs_dir, tmp_path):
    for kind in ("idd", "spot", "longitudinal", "convergence"):
        out = tmp_path / f"{kind}.png"
        render(PlotSpec(kind=kind, indir=outputs_dir, out=out))
        assert out.stat().st_size > 1000


def test_idd_series_includes_four_markers(outputs_dir):
    series = load_idd(outputs_dir)
    assert set(series["markers"]) == {"bragg_peak_cm", "p90_cm",
                                      "d90_cm", "d20_cm"}
    assert series["x_cm"].size == series["idd"].size == 25


def test_fitted_order_is_limiting_component():
    h = np.array([0.4, 0.2, 0.1])
    assert fitted_order(h, 3.0 * h**2.6, 2.0 * h**2.1) == pytest.approx(2.1)
    assert fitted_order(h, 3.0 * h**1.8, 2.0 * h**2.1) == pytest.approx(1.8)


def test_convergence_orders_match_tabulated_powers(outputs_dir):
    series = load_convergence(outputs_dir)
    assert series["depth"]["order"] == pytest.approx(1.9, abs=1e-6)
    assert series["energy"]["order"] == pytest.approx(2.1, abs=1e-6)


def test_rendering_is_pure(outputs_dir, tmp_path):
    spec = PlotSpec(kind="longitudinal", indir=outputs_dir,
                    out=tmp_path / "a.png")
    first = render(spec)
    second = render(spec)
    for key in first:
        assert np.array_equal(first[key], second[key])


def test_spot_depth_selection(outputs_dir, tmp_path):
    (outputs_dir / "spot_2cm.csv").write_text(
        "y_cm,z_cm,dose\n0.0,0.0,1.0\n")
    series = render(PlotSpec(kind="spot", indir=outputs_dir,
                             out=tmp_path / "s.png"))
    assert series["depth_label"] == "1cm"
    series = render(PlotSpec(kind="spot", indir=outputs_dir,
                             out=tmp_path / "s2.png", depth_cm=2.0))
    assert series["depth_label"] == "2cm"


def test_missing_column_names_file_and_column(outputs_dir, tmp_path):
    (outputs_dir / "idd.csv").write_text("x_cm,dose\n0.0,1.0\n0.1,1.0\n")
    with pytest.raises(VizError, match=r"idd\.csv.*'idd'"):
        render(PlotSpec(kind="idd", indir=outputs_dir,
                        out=tmp_path / "x.png"))


def test_missing_file_is_reported(outputs_dir, tmp_path):
    (outputs_dir / "ld.csv").unlink()
    with pytest.raises(VizError, match="ld.csv"):
        render(PlotSpec(kind="longitudinal", indir=outputs_dir,
                        out=tmp_path / "x.png"))


def test_unknown_kind_rejected(outputs_dir, tmp_path):
    with pytest.raises(VizError, match="unknown plot kind"):
        PlotSpec(kind="surface", indir=outputs_dir, out=tmp_path / "x.png")


def test_incomplete_grid_rejected(outputs_dir, tmp_path):
    (outputs_dir / "spot_1cm.csv").write_text(
        "y_cm,z_cm,dose\n0.0,0.0,1.0\n0.0,1.0,1.0\n1.0,0.0,1.0\n")
    with pytest.raises(VizError, match="complete"):
        render(PlotSpec(kind="spot", indir=outputs_dir,
                        out=tmp_path / "x.png"))


def test_cli_success_and_error_codes(outputs_dir, tmp_path, capsys):
    out = tmp_path / "fig.png"
    assert main(["idd", "--in", str(outputs_dir), "--out", str(out)]) == 0
    assert out.exists()
    rc = main(["convergence", "--in", str(tmp_path / "nowhere"),
               "--out", str(tmp_path / "y.png")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err
