"""Plot construction from the solver's delimited outputs.

Each plot kind has a loader that turns the CSV files into plain arrays
(the "plotted data series") and a renderer that draws those arrays with
matplotlib. Loading and drawing are separated so the data series can be
checked independently of image bytes: rendering the same inputs twice
plots identical series.
"""

from __future__ import annotations

import pathlib
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("idd", "spot", "longitudinal", "convergence")

IDD_MARKERS = ("bragg_peak_cm", "p90_cm", "d90_cm", "d20_cm")


class VizError(Exception):
    """Bad plot request: unknown kind, missing file or missing column."""


@dataclass(frozen=True)
class PlotSpec:
    """One figure request: which kind, where the CSVs live, where to save.

    ``depth_cm`` selects the spot file for the spot kind; when omitted the
    shallowest available spot_<depth>cm.csv is used.
    """

    kind: str
    indir: pathlib.Path
    out: pathlib.Path
    depth_cm: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VizError(f"unknown plot kind '{self.kind}'; "
                           f"expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "indir", pathlib.Path(self.indir))
        object.__setattr__(self, "out", pathlib.Path(self.out))
        if not self.indir.is_dir():
            raise VizError(f"input directory not found: {self.indir}")


def _read_table(path: pathlib.Path, required: tuple) -> np.ndarray:
    if not path.is_file():
        raise VizError(f"missing input file: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None,
                         encoding="utf-8")
    names = data.dtype.names or ()
    for col in required:
        if col not in names:
            raise VizError(f"{path}: missing column '{col}'")
    return np.atleast_1d(data)


def _read_metrics(indir: pathlib.Path) -> dict:
    data = _read_table(indir / "metrics.csv", ("metric", "value"))
    return {str(m): float(v) for m, v in zip(data["metric"], data["value"])}


# ---------------------------------------------------------------------------
# Loaders: CSV files -> plain plotted series


def load_idd(indir: pathlib.Path) -> dict:
    data = _read_table(indir / "idd.csv", ("x_cm", "idd"))
    metrics = _read_metrics(indir)
    for name in IDD_MARKERS:
        if name not in metrics:
            raise VizError(f"{indir / 'metrics.csv'}: missing metric '{name}'")
    return {
        "x_cm": np.asarray(data["x_cm"], dtype=float),
        "idd": np.asarray(data["idd"], dtype=float),
        "markers": {name: metrics[name] for name in IDD_MARKERS},
    }


def _grid_from_long(data, row_col: str, col_col: str, val_col: str) -> dict:
    """Reshape a row-major long-format table into axis vectors + a matrix."""
    rows = np.unique(np.asarray(data[row_col], dtype=float))
    cols = np.unique(np.asarray(data[col_col], dtype=float))
    values = np.asarray(data[val_col], dtype=float)
    if values.size != rows.size * cols.size:
        raise VizError(f"{val_col} column is not a complete "
                       f"{rows.size} x {cols.size} grid")
    return {row_col: rows, col_col: cols,
            val_col: values.reshape(rows.size, cols.size)}


def _spot_path(spec: PlotSpec) -> pathlib.Path:
    if spec.depth_cm is not None:
        return spec.indir / f"spot_{spec.depth_cm:g}cm.csv"
    candidates = sorted(
        spec.indir.glob("spot_*cm.csv"),
        key=lambda p: float(p.stem[len("spot_"):-len("cm")]),
    )
    if not candidates:
        raise VizError(f"no spot_<depth>cm.csv files in {spec.indir}")
    return candidates[0]


def load_spot(spec: PlotSpec) -> dict:
    path = _spot_path(spec)
    data = _read_table(path, ("y_cm", "z_cm", "dose"))
    out = _grid_from_long(data, "y_cm", "z_cm", "dose")
    out["depth_label"] = path.stem[len("spot_"):]
    return out


def load_longitudinal(indir: pathlib.Path) -> dict:
    data = _read_table(indir / "ld.csv", ("x_cm", "y_cm", "dose"))
    return _grid_from_long(data, "x_cm", "y_cm", "dose")


def load_convergence(indir: pathlib.Path) -> dict:
    data = _read_table(indir / "convergence.csv",
                       ("axis", "h", "err1", "err2"))
    axes = {}
    for axis in dict.fromkeys(str(a) for a in data["axis"]):
        sel = np.asarray([str(a) == axis for a in data["axis"]])
        h = np.asarray(data["h"], dtype=float)[sel]
        err1 = np.asarray(data["err1"], dtype=float)[sel]
        err2 = np.asarray(data["err2"], dtype=float)[sel]
        if h.size < 2:
            raise VizError(f"axis '{axis}' has fewer than two levels")
        axes[axis] = {"h": h, "err1": err1, "err2": err2,
                      "order": fitted_order(h, err1, err2)}
    return axes


def fitted_order(h: np.ndarray, err1: np.ndarray, err2: np.ndarray) -> float:
    """Observed order from the tabulated errors.

    Least-squares slope of log err vs log h per component; the scheme's
    order is the slower (limiting) component. This mirrors the solver's
    own convergence report, so the annotated slope matches it exactly.
    """
    slope1 = np.polyfit(np.log(h), np.log(err1), 1)[0]
    slope2 = np.polyfit(np.log(h), np.log(err2), 1)[0]
    return float(min(slope1, slope2))


# ---------------------------------------------------------------------------
# Renderers


def _render_idd(series: dict, out: pathlib.Path, title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(series["x_cm"], series["idd"], lw=1.5, color="tab:blue")
    for name, style in zip(IDD_MARKERS, ("-", "--", "--", ":")):
        ax.axvline(series["markers"][name], color="tab:red", ls=style,
                   lw=0.9, label=f"{name} = {series['markers'][name]:.3f}")
    ax.set_xlabel("depth [cm]")
    ax.set_ylabel("integrated depth dose [MeV cm$^2$/g]")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _render_spot(series: dict, out: pathlib.Path):
    fig, ax = plt.subplots(figsize=(5.4, 4.2))
    pcm = ax.pcolormesh(series["y_cm"], series["z_cm"], series["dose"].T,
                        shading="auto")
    fig.colorbar(pcm, ax=ax, label="dose [MeV/g]")
    ax.set_xlabel("y [cm]")
    ax.set_ylabel("z [cm]")
    ax.set_title(f"spot at {series['depth_label']}")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _render_longitudinal(series: dict, out: pathlib.Path):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    dose = series["dose"]
    pcm = ax.pcolormesh(series["x_cm"], series["y_cm"], dose.T,
                        shading="auto")
    fig.colorbar(pcm, ax=ax, label="dose [MeV cm/g]")
    levels = np.max(dose) * np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    ax.contour(series["x_cm"], series["y_cm"], dose.T, levels=levels,
               colors="white", linewidths=0.6)
    ax.set_xlabel("depth [cm]")
    ax.set_ylabel("y [cm]")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _render_convergence(series: dict, out: pathlib.Path):
    n = len(series)
    fig, axes = plt.subplots(1, n, figsize=(4.6 * n, 4.0), squeeze=False)
    for ax, (axis, data) in zip(axes[0], series.items()):
        ax.loglog(data["h"], data["err1"], "o-", label="component 1")
        ax.loglog(data["h"], data["err2"], "s-", label="component 2")
        ref = data["err2"][0] * (data["h"] / data["h"][0]) ** 2
        ax.loglog(data["h"], ref, "k:", lw=0.8, label="slope 2 reference")
        ax.set_xlabel("step size h")
        ax.set_ylabel("error")
        ax.set_title(f"{axis}: order {data['order']:.3f}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def render(spec: PlotSpec) -> dict:
    """Render one figure; returns the plotted data series for inspection."""
    if spec.kind == "idd":
        series = load_idd(spec.indir)
        _render_idd(series, spec.out, spec.indir.name)
    elif spec.kind == "spot":
        series = load_spot(spec)
        _render_spot(series, spec.out)
    elif spec.kind == "longitudinal":
        series = load_longitudinal(spec.indir)
        _render_longitudinal(series, spec.out)
    else:
        series = load_convergence(spec.indir)
        _render_convergence(series, spec.out)
    return series
