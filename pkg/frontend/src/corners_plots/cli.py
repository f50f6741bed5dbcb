"""Command line entry point: ``plots <kind> --in ... --out ...``.

Thin wrapper turning flags into a FigureJob and rendering it.  Exit code
0 on success, 2 on bad input (missing file, schema mismatch, unusable
options).  Output bytes depend only on the input files and flags.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .figures import KINDS, FigureJob, render
from .io import PlotInputError

_DESCRIPTIONS = {
    "frozen-boundary": "Closed support-edge curve from a boundary table (n_hat, l, r).",
    "cov-agreement": "Per-pair covariance path discrepancies as bars with tolerance lines.",
    "hist": "Histogram of one standardized sampled coordinate with a unit Gaussian overlay.",
    "qq": "Normal quantile-quantile plot of one standardized sampled coordinate.",
    "root-scatter": "Crystallization targets per level, optionally over the sampled points.",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description=(
            "Render static figures from corners-ensemble CSV/JSON tables. "
            "Nothing is recomputed; figures show the tables as written."
        ),
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        cmd = sub.add_parser(kind, help=_DESCRIPTIONS[kind], description=_DESCRIPTIONS[kind])
        nargs = "+" if kind == "root-scatter" else 1
        cmd.add_argument(
            "--in", dest="inputs", nargs=nargs, required=True, metavar="TABLE",
            help="input table path(s); root-scatter accepts an optional second samples table",
        )
        cmd.add_argument("--out", required=True, help="output PNG path")
        cmd.add_argument("--dpi", type=int, default=None, help="raster resolution")
        cmd.add_argument("--title", default=None, help="figure title override")
        if kind in ("hist", "qq"):
            cmd.add_argument(
                "--level", type=int, default=None,
                help="level of the coordinate to standardize (default: largest present)",
            )
            cmd.add_argument(
                "--index", type=int, default=None,
                help="index of the coordinate within its level (default: 1)",
            )
        if kind == "hist":
            cmd.add_argument("--bins", type=int, default=None, help="histogram bin count")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    style = {}
    for key in ("dpi", "title", "bins", "level", "index"):
        value = getattr(args, key, None)
        if value is not None:
            style[key] = value
    try:
        job = FigureJob(
            kind=args.kind, inputs=tuple(args.inputs),
            out_path=args.out, style=style,
        )
        out = render(job)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
