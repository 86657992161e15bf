"""Figure rendering for spin-chain simulation outputs.

Consumes the simulator's emitted files (series.csv, sweep_summary.csv,
histogram.csv, plateaus.json) and renders static images; never recomputes
physics.
"""

from .plots import KINDS, PlotJob, render
from .schema import SchemaError, read_table

__all__ = ["KINDS", "PlotJob", "render", "SchemaError", "read_table"]
