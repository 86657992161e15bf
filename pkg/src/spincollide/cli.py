"""Command-line interface.

Subcommands: run (one config), sweep (config x grid), analyze (plateau
report from an existing series CSV), preset (named figure presets).
Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

import argparse
import os
import sys

from .config import parse_config
from .errors import CapacityError, DiagonalizationError, ParameterError
from .plateaus import PlateauConfig, analyze_series
from .presets import get_preset, preset_catalog
from .runner import (parse_grid, read_series_csv, run_experiment,
                     run_histogram_experiment, run_sweep)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spincollide",
        description="Disordered XXZ chain with collisional dephasing: "
                    "trajectory ensembles and localization analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--force", action="store_true",
                       help="write into a non-empty output directory")
    p_run.add_argument("--threads", type=int, default=1)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid over a base config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--grid", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--force", action="store_true")
    p_sweep.add_argument("--threads", type=int, default=1)

    p_an = sub.add_parser("analyze", help="plateau report for an existing series CSV")
    p_an.add_argument("--series", required=True)
    p_an.add_argument("--column", default="ier")
    p_an.add_argument("--dim", type=int, required=True,
                      help="sector dimension (sets the tau threshold 10/dim)")
    p_an.add_argument("--rc", type=float, default=0.0)
    p_an.add_argument("--h", type=float, default=0.0)
    p_an.add_argument("--nu", type=float, default=0.0)
    p_an.add_argument("--window", type=int, default=25)
    p_an.add_argument("--slope", type=float, default=0.002)
    p_an.add_argument("--dmin", type=float, default=1.0)
    p_an.add_argument("--floor", type=float, default=0.0)

    p_pre = sub.add_parser("preset", help="run a named figure preset")
    p_pre.add_argument("--name", required=True)
    p_pre.add_argument("--out", required=True)
    scale = p_pre.add_mutually_exclusive_group()
    scale.add_argument("--desk", action="store_true", default=True,
                       help="desk-scale variant (default)")
    scale.add_argument("--paper", dest="desk", action="store_false",
                       help="full paper-scale variant")
    p_pre.add_argument("--force", action="store_true")
    p_pre.add_argument("--threads", type=int, default=1)
    p_pre.add_argument("--list", action="store_true", help="list presets and exit")
    return parser


def _cmd_run(args):
    cfg = parse_config(args.config)
    res = run_experiment(cfg, args.out, force=args.force, threads=args.threads)
    print(f"wrote {res.out_dir}/series.csv ({len(res.series.times)} samples)")


def _cmd_sweep(args):
    cfg = parse_config(args.config)
    axes = parse_grid(args.grid)
    summary = run_sweep(cfg, axes, args.out, force=args.force, threads=args.threads)
    print(f"wrote {summary}")


def _cmd_analyze(args):
    data = read_series_csv(args.series)
    if args.column not in data:
        raise ParameterError(f"column {args.column!r} not in {args.series}")
    config = PlateauConfig(window=args.window, slope=args.slope, d_min=args.dmin,
                           floor=args.floor)
    report = analyze_series(data["t"], data[args.column], args.dim,
                            rc=args.rc, h=args.h, nu=args.nu, config=config)
    print(report.to_json())


def _cmd_preset(args):
    if args.list:
        for name, preset in sorted(preset_catalog().items()):
            print(f"{name:8s} [{preset.kind:9s}] {preset.note}")
        return
    preset = get_preset(args.name)
    os.makedirs(args.out, exist_ok=True)
    if preset.kind == "sweep":
        _, base = next(preset.configs(desk=args.desk))
        summary = run_sweep(base, preset.grid_axes(desk=args.desk), args.out,
                            force=args.force, threads=args.threads)
        print(f"wrote {summary}")
        return
    for label, cfg in preset.configs(desk=args.desk):
        sub = os.path.join(args.out, label)
        if preset.kind == "histogram":
            path = run_histogram_experiment(cfg, sub, force=args.force)
            print(f"wrote {path}")
        else:
            res = run_experiment(cfg, sub, force=args.force, threads=args.threads)
            print(f"wrote {res.out_dir}/series.csv")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep,
               "analyze": _cmd_analyze, "preset": _cmd_preset}[args.command]
    try:
        handler(args)
    except (ParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CapacityError, DiagonalizationError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
