"""CSV/JSON readers with named-column validation.

Tables come back as {column: numpy array}; a column parses to float64
(empty fields become NaN) when every non-empty cell is numeric, otherwise
it stays an object array of strings. Missing required columns raise
SchemaError naming the file, the columns, and what is actually present.
"""

import csv
import json
import os

import numpy as np


class SchemaError(Exception):
    """An input file does not match the plot kind's expected schema."""


def read_table(path) -> dict:
    if not os.path.isfile(path):
        raise SchemaError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a CSV header") from None
        rows = [r for r in reader if r]
    table = {}
    for i, name in enumerate(header):
        cells = [r[i] if i < len(r) else "" for r in rows]
        try:
            table[name] = np.array([float(c) if c != "" else np.nan for c in cells])
        except ValueError:
            table[name] = np.array(cells, dtype=object)
    return table


def require_columns(table: dict, columns, path, kind: str) -> None:
    missing = [c for c in columns if c not in table]
    if missing:
        raise SchemaError(
            f"{path}: kind {kind!r} needs column(s) {', '.join(missing)}; "
            f"file has: {', '.join(table)}")


def numeric_column(table: dict, name: str, path, kind: str) -> np.ndarray:
    require_columns(table, (name,), path, kind)
    col = table[name]
    if col.dtype == object:
        raise SchemaError(f"{path}: column {name!r} is not numeric (kind {kind!r})")
    return col


def site_columns(table: dict, path, kind: str):
    """The n_1..n_N site-density columns, in site order."""
    names = sorted((c for c in table if c.startswith("n_") and c[2:].isdigit()),
                   key=lambda c: int(c[2:]))
    if not names:
        raise SchemaError(f"{path}: kind {kind!r} needs site columns n_1..n_N; "
                          f"file has: {', '.join(table)}")
    return names, np.column_stack([table[c] for c in names])


def read_plateaus(series_path) -> list:
    """First-plateau spans from a plateaus.json next to a series.csv, if any."""
    path = os.path.join(os.path.dirname(series_path), "plateaus.json")
    if not os.path.isfile(path):
        return []
    with open(path) as fh:
        report = json.load(fh)
    return [(p["t_start"], p["t_end"]) for p in report.get("plateaus", [])]
