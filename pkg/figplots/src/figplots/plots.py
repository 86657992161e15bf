"""Plot kinds: each consumes emitted CSV files and renders one image.

Kinds and their expected inputs:
  timeseries        one or more series.csv  (column picked or auto)
  heatmap_site_time one series.csv with n_1..n_N site columns
  heatmap_param     one sweep_summary.csv   (x/y axes, value column)
  scatter3d         one sweep_summary.csv   (z column over h, r_c)
  collapse          one sweep_summary.csv   (area vs h*r_c*nu, semi-log x)
  histogram         one histogram.csv       (counts vs time bin)

Rendering is deterministic: fixed figure size, no randomness, data is
drawn exactly as read (the straight-line digitization round-trip in the
tests pins this down).
"""

import os
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import (SchemaError, numeric_column, read_plateaus, read_table,
                     require_columns, site_columns)

FIGSIZE = (6.4, 4.8)
DPI = 150

# auto column preference for timeseries inputs
_SERIES_PREFERENCE = ("ipr", "ier", "imb", "svn")


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple
    out: str
    options: dict = field(default_factory=dict)


def _save(fig, out):
    fig.savefig(out, dpi=DPI, metadata={"Software": "figplots"})
    plt.close(fig)


def _label_for(path, explicit):
    if explicit is not None:
        return explicit
    parent = os.path.basename(os.path.dirname(os.path.abspath(path)))
    return parent or os.path.basename(path)


def _auto_column(table, path):
    for name in _SERIES_PREFERENCE:
        if name in table and table[name].dtype != object and np.isfinite(table[name]).any():
            return name
    raise SchemaError(f"{path}: no plottable series column among "
                      f"{', '.join(_SERIES_PREFERENCE)}; file has: {', '.join(table)}")


def plot_timeseries(job: PlotJob):
    opts = job.options
    labels = opts.get("labels")
    if labels is not None and len(labels) != len(job.inputs):
        raise SchemaError(f"{len(labels)} labels given for {len(job.inputs)} inputs")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    column = opts.get("column")
    for i, path in enumerate(job.inputs):
        table = read_table(path)
        col = column or _auto_column(table, path)
        t = numeric_column(table, "t", path, job.kind)
        y = numeric_column(table, col, path, job.kind)
        rc = opts.get("rescale_rc")
        ax.plot(t * rc if rc else t, y,
                label=_label_for(path, labels[i] if labels else None), lw=1.0)
    if len(job.inputs) == 1 and opts.get("plateau_overlay", True):
        for t_start, t_end in read_plateaus(job.inputs[0]):
            ax.axvspan(t_start, t_end, color="0.85", zorder=0)
    if opts.get("logy"):
        ax.set_yscale("log")
    ax.set_xlabel(opts.get("xlabel", "tJ" if not opts.get("rescale_rc") else "tJ r_c"))
    ax.set_ylabel(opts.get("ylabel", column or "value"))
    ax.legend(fontsize=8)
    _finish(fig, ax, job)
    return fig


def plot_heatmap_site_time(job: PlotJob):
    path = _single_input(job)
    table = read_table(path)
    t = numeric_column(table, "t", path, job.kind)
    _, density = site_columns(table, path, job.kind)
    if not np.isfinite(density).any():
        raise SchemaError(f"{path}: site columns n_1..n_N are all empty")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    im = ax.imshow(density.T, aspect="auto", origin="lower", cmap="viridis",
                   extent=(float(t[0]), float(t[-1]), 0.5, density.shape[1] + 0.5))
    fig.colorbar(im, ax=ax, label=job.options.get("ylabel", "site density"))
    ax.set_xlabel("tJ")
    ax.set_ylabel("site")
    _finish(fig, ax, job)
    return fig


def plot_heatmap_param(job: PlotJob):
    path = _single_input(job)
    opts = job.options
    x_name = opts.get("x", "nu")
    y_name = opts.get("y", "r_c")
    v_name = opts.get("value", "ier_final")
    table = read_table(path)
    x = numeric_column(table, x_name, path, job.kind)
    y = numeric_column(table, y_name, path, job.kind)
    v = numeric_column(table, v_name, path, job.kind)
    xs, ys = np.unique(x), np.unique(y)
    grid = np.full((len(ys), len(xs)), np.nan)
    for xi, yi, vi in zip(x, y, v):
        grid[np.searchsorted(ys, yi), np.searchsorted(xs, xi)] = vi
    fig, ax = plt.subplots(figsize=FIGSIZE)
    im = ax.pcolormesh(np.arange(len(xs) + 1), np.arange(len(ys) + 1), grid,
                       cmap="viridis")
    ax.set_xticks(np.arange(len(xs)) + 0.5, [f"{v:g}" for v in xs])
    ax.set_yticks(np.arange(len(ys)) + 0.5, [f"{v:g}" for v in ys])
    fig.colorbar(im, ax=ax, label=v_name)
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    _finish(fig, ax, job)
    return fig


def plot_scatter3d(job: PlotJob):
    path = _single_input(job)
    opts = job.options
    z_name = opts.get("z", "tau")
    table = read_table(path)
    h = numeric_column(table, "h", path, job.kind)
    rc = numeric_column(table, "r_c", path, job.kind)
    z = numeric_column(table, z_name, path, job.kind)
    finite = np.isfinite(z)
    fig = plt.figure(figsize=FIGSIZE)
    ax = fig.add_subplot(projection="3d")
    ax.scatter(h[finite], rc[finite], z[finite], c=z[finite], cmap="viridis",
               depthshade=False)
    if (~finite).any():
        # beyond-horizon points drawn hollow at the top of the finite range
        top = float(np.nanmax(z[finite])) if finite.any() else 1.0
        ax.scatter(h[~finite], rc[~finite], np.full((~finite).sum(), top),
                   facecolors="none", edgecolors="crimson", marker="^",
                   label="beyond horizon")
        ax.legend(fontsize=8)
    ax.set_xlabel("h")
    ax.set_ylabel("r_c")
    ax.set_zlabel(z_name)
    if job.options.get("title"):
        ax.set_title(job.options["title"])
    _save(fig, job.out)
    return fig


def plot_collapse(job: PlotJob):
    path = _single_input(job)
    opts = job.options
    y_name = opts.get("value", "area")
    table = read_table(path)
    h = numeric_column(table, "h", path, job.kind)
    rc = numeric_column(table, "r_c", path, job.kind)
    nu = numeric_column(table, "nu", path, job.kind)
    y = numeric_column(table, y_name, path, job.kind)
    x = h * rc * nu
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for one_nu in np.unique(nu):
        sel = nu == one_nu
        order = np.argsort(x[sel])
        ax.plot(x[sel][order], y[sel][order], "o-", ms=4, lw=0.8,
                label=f"nu = {one_nu:g}")
    ax.set_xscale("log")
    ax.set_xlabel("h r_c nu")
    ax.set_ylabel(y_name)
    ax.legend(fontsize=8)
    _finish(fig, ax, job)
    return fig


def plot_histogram(job: PlotJob):
    path = _single_input(job)
    table = read_table(path)
    require_columns(table, ("site", "bin_start", "count"), path, job.kind)
    bins = numeric_column(table, "bin_start", path, job.kind)
    counts = numeric_column(table, "count", path, job.kind)
    starts = np.unique(bins)
    totals = np.array([counts[bins == b].sum() for b in starts])
    width = float(np.min(np.diff(starts))) if len(starts) > 1 else 1.0
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.bar(starts, totals, width=width, align="edge", edgecolor="black", lw=0.3)
    ax.set_xlabel("tJ")
    ax.set_ylabel("collisions per bin")
    _finish(fig, ax, job)
    return fig


def _single_input(job: PlotJob):
    if len(job.inputs) != 1:
        raise SchemaError(f"kind {job.kind!r} takes exactly one input file, "
                          f"got {len(job.inputs)}")
    return job.inputs[0]


def _finish(fig, ax, job: PlotJob):
    if job.options.get("title"):
        ax.set_title(job.options["title"])
    fig.tight_layout()
    _save(fig, job.out)


KINDS = {
    "timeseries": plot_timeseries,
    "heatmap_site_time": plot_heatmap_site_time,
    "heatmap_param": plot_heatmap_param,
    "scatter3d": plot_scatter3d,
    "collapse": plot_collapse,
    "histogram": plot_histogram,
}


def render(job: PlotJob):
    """Render one job; returns the matplotlib Figure (already saved)."""
    if job.kind not in KINDS:
        raise SchemaError(f"unknown plot kind {job.kind!r}; "
                          f"choose from {', '.join(sorted(KINDS))}")
    if not job.inputs:
        raise SchemaError("at least one input file is required")
    return KINDS[job.kind](job)
