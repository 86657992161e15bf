"""Experiment execution and deterministic file emission.

A run writes series.csv (t, ipr, ier, imb, svn, n_1..n_N; unselected
observables left empty), plateaus.json/.csv, and manifest.json with every
parameter needed to reproduce the run. Reruns are byte-identical except
for the manifest's "timing" block.
"""

import csv
import itertools
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .basis import build_basis
from .config import ExperimentConfig, center_site, config_from_dict, initial_state
from .errors import ParameterError
from .hamiltonian import build_hamiltonian, diagonalize
from .noise import collision_histogram, generate_events
from .observables import ObservableSeries, build_series
from .plateaus import analyze_series
from .trajectories import run_ensemble

_FMT = "%.12g"


def _fmt(x) -> str:
    if x is None:
        return ""
    return _FMT % x


def _prepare_out_dir(out_dir, force: bool):
    os.makedirs(out_dir, exist_ok=True)
    if os.listdir(out_dir) and not force:
        raise ParameterError(f"output directory {out_dir} is not empty (use --force)")


def write_series_csv(path, series: ObservableSeries, selected: tuple):
    n_sites = series.site_density.shape[1]
    cols = ["t", "ipr", "ier", "imb", "svn"] + [f"n_{i}" for i in range(1, n_sites + 1)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for s, t in enumerate(series.times):
            row = [_fmt(t),
                   _fmt(series.ipr[s]) if "ipr" in selected and series.ipr is not None else "",
                   _fmt(series.ier[s]) if "ier" in selected else "",
                   _fmt(series.imb[s]) if "imb" in selected and series.imb is not None else "",
                   _fmt(series.svn[s]) if "svn" in selected and series.svn is not None else ""]
            if "sites" in selected:
                row += [_fmt(v) for v in series.site_density[s]]
            else:
                row += [""] * n_sites
            writer.writerow(row)


def read_series_csv(path):
    """Series CSV back as {column: float array}; empty fields become NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    out = {}
    for i, name in enumerate(header):
        out[name] = np.array([float(r[i]) if r[i] != "" else np.nan for r in rows])
    return out


REPORT_COLUMNS = ("h", "r_c", "nu", "delta", "D", "Z_J", "area", "P_h",
                  "tau", "horizon_flag", "ier_final")


def report_row(report, cfg: ExperimentConfig, ier_final: float) -> dict:
    return {
        "h": cfg["chain.h"], "r_c": cfg["noise.rc"], "nu": cfg["noise.nu"],
        "delta": cfg["chain.delta"], "D": report.duration, "Z_J": report.height,
        "area": report.area, "P_h": report.power,
        "tau": report.horizon if report.tau_beyond_horizon else report.tau,
        "horizon_flag": int(report.tau_beyond_horizon),
        "ier_final": ier_final,
    }


def write_report_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) if c != "horizon_flag" else str(row[c])
                             for c in REPORT_COLUMNS])


def _manifest(cfg: ExperimentConfig, extra: dict, wall_time: float) -> dict:
    return {
        "version": __version__,
        "config": dict(cfg.values),
        **extra,
        "timing": {"wall_time_s": wall_time, "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")},
    }


def _write_json(path, payload):
    class _Encoder(json.JSONEncoder):
        def default(self, obj):
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            if isinstance(obj, (np.integer,)):
                return int(obj)
            if isinstance(obj, (np.floating,)):
                return float(obj)
            return super().default(obj)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, cls=_Encoder)
        fh.write("\n")


@dataclass
class RunResult:
    series: ObservableSeries
    report: object
    out_dir: str


def run_experiment(cfg: ExperimentConfig, out_dir, force: bool = False,
                   threads: int = 1) -> RunResult:
    """Simulate one parameter point and write its files."""
    t0 = time.perf_counter()
    _prepare_out_dir(out_dir, force)

    basis = build_basis(cfg["chain.n_sites"], cfg.n_exc)
    chain = cfg.chain_spec()
    ham = diagonalize(build_hamiltonian(basis, chain))
    noise = cfg.noise_spec()
    ens = cfg.ensemble_spec()
    psi0 = initial_state(cfg["init.preset"], basis, n_exc=cfg["init.n_exc"],
                         sites=cfg["init.sites"])
    selected = cfg.observables()
    result = run_ensemble(ham, noise, ens, psi0, threads=threads,
                          want_entropy="svn" in selected)
    series = build_series(result, basis,
                          center_site=center_site(cfg) if "imb" in selected else None,
                          metadata=dict(cfg.values))

    report = analyze_series(series.times, series.ier, basis.dim,
                            rc=cfg["noise.rc"], h=cfg["chain.h"], nu=cfg["noise.nu"],
                            config=cfg.plateau_config(), params=dict(cfg.values))

    write_series_csv(os.path.join(out_dir, "series.csv"), series, selected)
    with open(os.path.join(out_dir, "plateaus.json"), "w") as fh:
        fh.write(report.to_json() + "\n")
    write_report_csv(os.path.join(out_dir, "plateaus.csv"),
                     [report_row(report, cfg, float(series.ier[-1]))])
    if cfg["output.eigenvalues"]:
        with open(os.path.join(out_dir, "eigenvalues.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "eigenvalue"])
            for k, val in enumerate(ham.eigenvalues):
                writer.writerow([k, _fmt(val)])

    extra = {
        "basis": {"dim": basis.dim, "n_exc": basis.n_exc},
        "disorder_fields": chain.fields,
        "noise_mu": noise.mu if np.isfinite(noise.mu) else None,
        "seeds": {"disorder": cfg["chain.disorder_seed"], "noise": cfg["noise.seed"],
                  "master": cfg["ensemble.master_seed"]},
        "threads": threads,
    }
    _write_json(os.path.join(out_dir, "manifest.json"),
                _manifest(cfg, extra, time.perf_counter() - t0))
    return RunResult(series=series, report=report, out_dir=out_dir)


def run_histogram_experiment(cfg: ExperimentConfig, out_dir, force: bool = False,
                             bin_width: float = 0.25):
    """Collision-count histogram over (site, time) for the configured noise."""
    t0 = time.perf_counter()
    _prepare_out_dir(out_dir, force)
    noise = cfg.noise_spec()
    ens = cfg.ensemble_spec()
    n_sites = cfg["chain.n_sites"]
    horizon = ens.t_final
    total = None
    for tr in range(ens.n_traj):
        events = generate_events(n_sites, noise, tr, horizon)
        counts, edges = collision_histogram(events, bin_width, n_sites, horizon)
        total = counts if total is None else total + counts
    path = os.path.join(out_dir, "histogram.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["site", "bin_start", "count"])
        for i in range(n_sites):
            for b in range(total.shape[1]):
                writer.writerow([i + 1, _fmt(edges[b]), int(total[i, b])])
    _write_json(os.path.join(out_dir, "manifest.json"),
                _manifest(cfg, {"bin_width": bin_width}, time.perf_counter() - t0))
    return path


def parse_grid(path) -> list:
    """Grid file: config keys with comma-separated value lists."""
    from .config import SCHEMA, _coerce
    axes = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            key, _, value = text.partition("=")
            key = key.strip()
            if key not in SCHEMA:
                raise ParameterError(f"{path}:{lineno}: unknown grid key {key!r}")
            values = [_coerce(key, v.strip()) for v in value.split(",") if v.strip()]
            if not values:
                raise ParameterError(f"{path}:{lineno}: empty value list for {key!r}")
            axes.append((key, values))
    return axes


def sweep_points(base_cfg: ExperimentConfig, axes: list):
    """Deterministic cartesian product of grid axes over the base config."""
    keys = [k for k, _ in axes]
    for combo in itertools.product(*[v for _, v in axes]):
        overrides = dict(base_cfg.values)
        overrides.update(dict(zip(keys, combo)))
        yield dict(zip(keys, combo)), config_from_dict(overrides)


def run_sweep(base_cfg: ExperimentConfig, axes: list, out_dir,
              force: bool = False, threads: int = 1) -> str:
    """One run per grid point plus a flat summary CSV of plateau reports."""
    _prepare_out_dir(out_dir, force)
    rows = []
    for idx, (combo, cfg) in enumerate(sweep_points(base_cfg, axes)):
        sub = os.path.join(out_dir, f"point_{idx:04d}")
        res = run_experiment(cfg, sub, force=force, threads=threads)
        rows.append(report_row(res.report, cfg, float(res.series.ier[-1])))
    summary = os.path.join(out_dir, "sweep_summary.csv")
    write_report_csv(summary, rows)
    return summary
