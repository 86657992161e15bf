"""Plateau detection and localization metrics for IPR/IER time series.

A plateau is a maximal run where the slope of the moving-average-smoothed
series stays below a threshold relative to the series range, lasting at
least d_min. The first plateau yields the duration D, height Z_J (mean of
the raw values over the run), and the dimensionless area Z_J * D * r_c.
"""

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class PlateauConfig:
    window: int = 25          # moving-average width, samples
    slope: float = 0.002      # |d value / d tJ| threshold, relative to range
    d_min: float = 1.0        # minimum duration, tJ
    floor: float = 0.0        # flat runs below this height are not counted
                              # as localization plateaus in the metrics (a
                              # delocalized series is flat at ~1/dim too)


@dataclass(frozen=True)
class Plateau:
    t_start: float
    t_end: float
    height: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass
class PlateauReport:
    plateaus: list
    duration: float           # D of the first plateau (0 if none)
    height: float             # Z_J of the first plateau (0 if none)
    area: float               # Z_J * D * r_c
    power: float              # P_h = h * r_c
    power_scaled: float       # h * r_c * nu
    tau: float                # complete delocalization time; inf if beyond horizon
    horizon: float
    params: dict = field(default_factory=dict)

    @property
    def tau_beyond_horizon(self) -> bool:
        return not math.isfinite(self.tau)

    def to_json(self) -> str:
        d = asdict(self)
        d["tau"] = None if self.tau_beyond_horizon else self.tau
        d["tau_beyond_horizon"] = self.tau_beyond_horizon
        return json.dumps(d, indent=2)


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    if window <= 1:
        return values.astype(float)
    kernel = np.ones(window) / window
    pad = window // 2
    padded = np.concatenate([np.full(pad, values[0]), values,
                             np.full(window - 1 - pad, values[-1])])
    return np.convolve(padded, kernel, mode="valid")


def detect_plateaus(times: np.ndarray, values: np.ndarray,
                    config: PlateauConfig = PlateauConfig()) -> list:
    """Maximal low-slope runs of duration >= d_min, as Plateau records."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < max(config.window, 2):
        raise ParameterError(
            f"series of length {len(times)} is shorter than window {config.window}")
    steps = np.diff(times)
    if steps.min() <= 0 or np.ptp(steps) > 1e-9 * steps[0]:
        raise ParameterError("series must be on a uniform, increasing time grid")

    smooth = _moving_average(values, config.window)
    slope = np.gradient(smooth, times)
    value_range = float(values.max() - values.min())
    threshold = config.slope * (value_range if value_range > 0 else 1.0)
    flat = np.abs(slope) <= threshold

    plateaus = []
    i = 0
    n = len(flat)
    while i < n:
        if flat[i]:
            j = i
            while j + 1 < n and flat[j + 1]:
                j += 1
            if times[j] - times[i] >= config.d_min:
                plateaus.append(Plateau(t_start=float(times[i]), t_end=float(times[j]),
                                        height=float(values[i:j + 1].mean())))
            i = j + 1
        else:
            i += 1
    return plateaus


def first_plateau_metrics(plateaus: list, rc: float, h: float, nu: float):
    """(D, Z_J, area, P_h, P_h*nu) from the first detected plateau."""
    if plateaus:
        first = plateaus[0]
        d, z = first.duration, first.height
    else:
        d = z = 0.0
    return d, z, z * d * rc, h * rc, h * rc * nu


def delocalization_time(times: np.ndarray, values: np.ndarray, dim: int,
                        horizon: float = None, plateaus: list = None,
                        threshold_factor: float = 10.0) -> float:
    """First grid time where the series drops below threshold_factor/dim.

    A crossing only counts if no plateau with height above twice the
    threshold begins later. Returns inf when no qualifying crossing lies
    within the horizon.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if horizon is None:
        horizon = float(times[-1])
    threshold = threshold_factor / dim
    plateaus = plateaus or []
    below = np.flatnonzero((values < threshold) & (times <= horizon))
    for k in below:
        t = float(times[k])
        if not any(p.t_start > t and p.height > 2.0 * threshold for p in plateaus):
            return t
    return math.inf


def collapse_transform(times: np.ndarray, rc: float) -> np.ndarray:
    """Rescale the abscissa to tJ * r_c."""
    if rc <= 0:
        raise ParameterError(f"collapse needs rc > 0, got {rc}")
    return np.asarray(times, dtype=float) * rc


def analyze_series(times: np.ndarray, values: np.ndarray, dim: int,
                   rc: float, h: float, nu: float,
                   config: PlateauConfig = PlateauConfig(),
                   params: dict = None) -> PlateauReport:
    """Full plateau/delocalization report for one parameter point."""
    plateaus = detect_plateaus(times, values, config)
    localized = [p for p in plateaus if p.height >= config.floor]
    d, z, area, power, power_scaled = first_plateau_metrics(localized, rc, h, nu)
    tau = delocalization_time(times, values, dim, plateaus=plateaus)
    return PlateauReport(plateaus=plateaus, duration=d, height=z, area=area,
                         power=power, power_scaled=power_scaled, tau=tau,
                         horizon=float(np.asarray(times)[-1]),
                         params=dict(params or {}))
