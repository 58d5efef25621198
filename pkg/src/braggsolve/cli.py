"""Command-line entry point.

Subcommands:
  run          solve a scenario from a config file or preset, write CSVs
  converge     run the standard self-convergence study
  fit-kernels  fit catastrophic kernel parameters from trajectory records
  presets      list available preset scenarios

Exit codes: 0 success, 2 configuration error, 3 input/output error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import FMT, execute, load_config, write_outputs
from .errors import ConfigError, DataError, NumericalError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braggsolve",
        description="Deterministic proton dose solver (depth splitting).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve a scenario and write outputs")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="INI scenario file")
    src.add_argument("--preset", help="named preset scenario")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--workers", type=int, default=None,
                       help="thread count (results are identical for any value)")
    p_run.add_argument("--report", action="store_true",
                       help="also render figures next to the CSV output")

    p_conv = sub.add_parser("converge", help="run the convergence study")
    p_conv.add_argument("--out", required=True)
    p_conv.add_argument("--depth-levels", type=int, default=3)
    p_conv.add_argument("--energy-levels", type=int, default=4)

    p_fit = sub.add_parser("fit-kernels", help="fit kernel parameters")
    p_fit.add_argument("--trajectories", required=True,
                       help="CSV with group,e_before_mev,e_after_mev,theta_rad")
    p_fit.add_argument("--out", required=True)

    sub.add_parser("presets", help="list preset scenarios")
    return parser


def _cmd_run(args) -> int:
    if args.preset:
        from .presets import get_preset

        spec = get_preset(args.preset)
    else:
        spec = load_config(args.config)
    out = execute(spec, workers=args.workers)
    write_outputs(out, args.out, config_path=args.config)
    if args.report:
        _render_report(out, args.out)
    budget = out.result.budget
    print(f"{spec.name}: peak {out.metrics['bragg_peak_cm']:.4g} cm, "
          f"budget residual {budget['residual_rel']:.3e}")
    return 0


def _render_report(out, outdir):
    """Render figures for the run: depth-dose, dose map, spot profiles."""
    import pathlib

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = pathlib.Path(outdir)
    grids = out.spec.grids()
    s = grids.spatial

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(s.x_slabs, out.idd, lw=1.5)
    ax.set_xlabel("depth [cm]")
    ax.set_ylabel("integrated depth dose [MeV cm$^2$/g]")
    ax.set_title(out.spec.name)
    fig.tight_layout()
    fig.savefig(outdir / "idd.png", dpi=150)
    plt.close(fig)

    from .tally import longitudinal_dose

    ld = longitudinal_dose(out.dose, s)
    fig, ax = plt.subplots(figsize=(6, 4))
    pcm = ax.pcolormesh(s.x_slabs, s.y_centers, ld.T, shading="auto")
    fig.colorbar(pcm, ax=ax, label="dose [MeV cm/g]")
    ax.set_xlabel("depth [cm]")
    ax.set_ylabel("y [cm]")
    fig.tight_layout()
    fig.savefig(outdir / "ld.png", dpi=150)
    plt.close(fig)

    for depth in out.spec.spot_depths_cm:
        i = min(int(depth / s.dx), s.n_x - 1)
        fig, ax = plt.subplots(figsize=(5, 4))
        pcm = ax.pcolormesh(s.y_centers, s.z_centers, out.dose[i].T, shading="auto")
        fig.colorbar(pcm, ax=ax, label="dose [MeV/g]")
        ax.set_xlabel("y [cm]")
        ax.set_ylabel("z [cm]")
        ax.set_title(f"depth {depth:g} cm")
        fig.tight_layout()
        fig.savefig(outdir / f"spot_{depth:g}cm.png", dpi=150)
        plt.close(fig)


def _cmd_converge(args) -> int:
    import pathlib

    from .convergence import standard_study

    depth, energy = standard_study(args.depth_levels, args.energy_levels)
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "convergence.csv", "w", newline="") as fh:
        fh.write("axis,h,err1,err2\n")
        for res in (depth, energy):
            for h, e1, e2 in zip(res.h, res.err1, res.err2):
                fh.write(f"{res.axis},{FMT % h},{FMT % e1},{FMT % e2}\n")
    with open(outdir / "orders.csv", "w", newline="") as fh:
        fh.write("axis,component,order\n")
        for res in (depth, energy):
            fh.write(f"{res.axis},1,{FMT % res.order1}\n")
            fh.write(f"{res.axis},2,{FMT % res.order2}\n")
            fh.write(f"{res.axis},min,{FMT % res.order}\n")
    print(f"depth order {depth.order:.3f}, energy order {energy.order:.3f}")
    return 0


def _cmd_fit(args) -> int:
    import pathlib

    from .catastrophic import fit_kernel, read_trajectories

    losses, thetas = read_trajectories(args.trajectories)
    params = fit_kernel(losses, thetas)
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "kernel_params.csv", "w", newline="") as fh:
        fh.write("parameter,value\n")
        fh.write(f"lambda_per_mev,{FMT % params.lam}\n")
        fh.write(f"alpha,{FMT % params.alpha}\n")
        fh.write(f"beta,{FMT % params.beta}\n")
    print(f"lambda={params.lam:.6g}/MeV alpha={params.alpha:.6g} "
          f"beta={params.beta:.6g}/rad from {losses.size} events")
    return 0


def _cmd_presets(_args) -> int:
    from .presets import PRESETS

    for name in sorted(PRESETS):
        print(name)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "converge": _cmd_converge,
        "fit-kernels": _cmd_fit,
        "presets": _cmd_presets,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"input/output error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
