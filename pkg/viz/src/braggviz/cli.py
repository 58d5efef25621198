"""Command-line entry point: ``viz <kind> --in <dir> --out <file>``.

Exit codes: 0 success, 2 bad request (unknown kind, missing file or
column, malformed table).
"""

from __future__ import annotations

import argparse
import sys

from .plots import KINDS, PlotSpec, VizError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viz",
        description="Render figures from braggsolve CSV outputs.",
    )
    parser.add_argument("kind", choices=KINDS, help="plot kind")
    parser.add_argument("--in", dest="indir", required=True,
                        help="directory with the solver's CSV outputs")
    parser.add_argument("--out", required=True, help="output image file")
    parser.add_argument("--depth", type=float, default=None,
                        help="spot depth in cm (spot kind only; "
                             "defaults to the shallowest available)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        render(PlotSpec(kind=args.kind, indir=args.indir, out=args.out,
                        depth_cm=args.depth))
    except VizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
