"""Command-line interface: figplots plot --kind K --in PATHS --out IMG.

Exit codes: 0 success, 1 schema/validation error, 2 runtime error.
"""

import argparse
import sys

from .plots import KINDS, PlotJob, render
from .schema import SchemaError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render static figures from simulation CSV/JSON outputs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one figure")
    p.add_argument("--kind", required=True, choices=sorted(KINDS))
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV file(s)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--column", help="series column (timeseries; default auto)")
    p.add_argument("--labels", help="comma-separated curve labels (timeseries)")
    p.add_argument("--x", help="x-axis column (heatmap_param; default nu)")
    p.add_argument("--y", help="y-axis column (heatmap_param; default r_c)")
    p.add_argument("--z", help="z-axis column (scatter3d; default tau)")
    p.add_argument("--value", help="value column (heatmap_param/collapse)")
    p.add_argument("--rescale-rc", type=float, default=None,
                   help="multiply the time axis by this rate (timeseries collapse view)")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--title")
    return parser


def _job_from_args(args) -> PlotJob:
    options = {}
    for name in ("column", "x", "y", "z", "value", "title"):
        if getattr(args, name) is not None:
            options[name] = getattr(args, name)
    if args.labels is not None:
        options["labels"] = [s.strip() for s in args.labels.split(",")]
    if args.rescale_rc is not None:
        options["rescale_rc"] = args.rescale_rc
    if args.logy:
        options["logy"] = True
    return PlotJob(kind=args.kind, inputs=tuple(args.inputs), out=args.out,
                   options=options)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        render(_job_from_args(args))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
