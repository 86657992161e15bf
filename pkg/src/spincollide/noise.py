"""Weibull-distributed collision times and the per-site event schedule.

Waiting times between collisions at a site are i.i.d. Weibull with shape
nu and scale mu, sampled by inverse transform t = mu * (-ln(1-u))^(1/nu)
with u uniform on [0, 1). The scale is fixed by the collision rate:
mu = 1 / (r_c * Gamma(1 + 1/nu)), so the mean waiting time is 1/r_c.

Each (trajectory, site) pair owns an independent RNG stream derived from
the master noise seed via numpy SeedSequence spawn keys, so trajectories
can run on any worker in any order with identical results.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

NO_EVENT = math.inf


@dataclass(frozen=True)
class NoiseSpec:
    """Collision-noise parameters. rc = 0 or nu = 0 means a closed system."""

    nu: float = 100.0
    rc: float = 0.0
    noise_seed: int = 0
    active_sites: tuple = None   # None = collisions at every site
    mu: float = field(init=False)

    def __post_init__(self):
        if self.nu < 0:
            raise ParameterError(f"shape parameter nu must be >= 0, got {self.nu}")
        if self.rc < 0:
            raise ParameterError(f"collision rate rc must be >= 0, got {self.rc}")
        if self.active_sites is not None:
            object.__setattr__(self, "active_sites", tuple(int(s) for s in self.active_sites))
        mu = math.inf
        if self.collisions_enabled:
            mu = 1.0 / (self.rc * math.gamma(1.0 + 1.0 / self.nu))
        object.__setattr__(self, "mu", mu)

    @property
    def collisions_enabled(self) -> bool:
        return self.rc > 0 and self.nu > 0


def site_stream(spec: NoiseSpec, trajectory_index: int, site: int) -> np.random.Generator:
    """Independent PCG64 stream for one (trajectory, site) pair."""
    seq = np.random.SeedSequence(spec.noise_seed, spawn_key=(trajectory_index, site))
    return np.random.Generator(np.random.PCG64(seq))


def sample_waiting_time(stream: np.random.Generator, spec: NoiseSpec, size=None):
    """Inverse-transform Weibull waiting time(s); u = 0 gives t = 0."""
    if not spec.collisions_enabled:
        raise ParameterError("waiting times are undefined for rc = 0 or nu = 0")
    u = stream.random(size)
    return spec.mu * (-np.log1p(-u)) ** (1.0 / spec.nu)


@dataclass
class CollisionSchedule:
    """Absolute next-collision time per site plus the owning RNG streams."""

    next_time: np.ndarray
    streams: list
    spec: NoiseSpec


def init_schedule(n_sites: int, spec: NoiseSpec, trajectory_index: int) -> CollisionSchedule:
    """First collision time for each site (absolute); inf for inactive sites."""
    next_time = np.full(n_sites, NO_EVENT)
    streams = [None] * n_sites
    if spec.collisions_enabled:
        active = range(n_sites) if spec.active_sites is None else spec.active_sites
        for i in active:
            streams[i] = site_stream(spec, trajectory_index, i)
            next_time[i] = sample_waiting_time(streams[i], spec)
    return CollisionSchedule(next_time=next_time, streams=streams, spec=spec)


def pop_next_event(schedule: CollisionSchedule):
    """Earliest pending collision as (site, time), or None if none pending.

    Ties break toward the lowest site index; the popped site is resampled
    (S_i -> S_i + t_new).
    """
    site = int(np.argmin(schedule.next_time))
    t = schedule.next_time[site]
    if not math.isfinite(t):
        return None
    schedule.next_time[site] = t + sample_waiting_time(schedule.streams[site], schedule.spec)
    return site, float(t)


def generate_events(n_sites: int, spec: NoiseSpec, trajectory_index: int,
                    horizon: float):
    """All collision events up to the horizon, time-ordered.

    Returns (times, sites) arrays sorted by time, ties by lowest site.
    Equivalent to draining init_schedule/pop_next_event, but sampled per
    site in bulk.
    """
    if not spec.collisions_enabled:
        return np.empty(0), np.empty(0, dtype=np.int64)
    all_times = []
    all_sites = []
    # expected events per site is rc * horizon; oversample and extend if short
    chunk = max(16, int(spec.rc * horizon * 1.3) + 8)
    active = range(n_sites) if spec.active_sites is None else spec.active_sites
    for i in active:
        stream = site_stream(spec, trajectory_index, i)
        times = np.cumsum(sample_waiting_time(stream, spec, size=chunk))
        while times[-1] <= horizon:
            more = np.cumsum(sample_waiting_time(stream, spec, size=chunk)) + times[-1]
            times = np.concatenate([times, more])
        times = times[times <= horizon]
        all_times.append(times)
        all_sites.append(np.full(len(times), i, dtype=np.int64))
    times = np.concatenate(all_times)
    sites = np.concatenate(all_sites)
    order = np.lexsort((sites, times))
    return times[order], sites[order]


def collision_histogram(events, bin_width: float, n_sites: int,
                        horizon: float = None) -> tuple:
    """Per-(site, time-bin) collision counts.

    `events` is an iterable of (site, time) pairs or a (times, sites) pair
    of arrays. Returns (counts[n_sites, n_bins], bin_edges).
    """
    if bin_width <= 0:
        raise ParameterError(f"bin width must be > 0, got {bin_width}")
    if isinstance(events, tuple) and len(events) == 2 and isinstance(events[0], np.ndarray):
        times, sites = events
    else:
        pairs = list(events)
        sites = np.array([p[0] for p in pairs], dtype=np.int64)
        times = np.array([p[1] for p in pairs], dtype=np.float64)
    if horizon is None:
        horizon = float(times.max()) if len(times) else bin_width
    n_bins = max(1, int(np.ceil(horizon / bin_width)))
    edges = np.arange(n_bins + 1) * bin_width
    counts = np.zeros((n_sites, n_bins), dtype=np.int64)
    if len(times):
        keep = times <= horizon
        bins = np.minimum((times[keep] / bin_width).astype(np.int64), n_bins - 1)
        np.add.at(counts, (sites[keep], bins), 1)
    return counts, edges
