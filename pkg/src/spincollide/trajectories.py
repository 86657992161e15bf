"""Pure-state trajectory evolution and ensemble accumulation.

Between collisions the state evolves exactly through the spectral
decomposition of the sector Hamiltonian (dt is only the output sampling
grid). A collision at site i multiplies every basis amplitude by
z_i = +/-1 (occupied/empty): the ancilla channel at theta = pi/2 reduces
exactly to a sigma^z conjugation, so no ancilla is ever represented.

The inner event loop works in the eigenbasis, where the sigma^z kick is a
low-rank orthogonal update: with P the projector onto the basis states
occupying site i, diag(z_i) = 2P - 1, so the eigenbasis kick is
c -> 2 W (W^T c) - c with W the eigenvector rows of the occupied states.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .basis import SectorBasis
from .errors import ParameterError
from .hamiltonian import ChainSpec, SectorHamiltonian, diagonalize
from .noise import NoiseSpec, generate_events

ENTROPY_MODES = ("per-trajectory-average", "averaged-state")


@dataclass(frozen=True)
class EnsembleSpec:
    """Monte-Carlo parameters; dt and t_final in units of 1/J."""

    n_traj: int = 100
    dt: float = 0.02
    t_final: float = 30.0
    master_seed: int = 0
    entropy_mode: str = "per-trajectory-average"
    bipartition_cut: int = None

    def __post_init__(self):
        if self.n_traj < 1:
            raise ParameterError(f"n_traj must be >= 1, got {self.n_traj}")
        if self.dt <= 0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")
        if self.t_final < self.dt:
            raise ParameterError(f"t_final must be >= dt, got {self.t_final}")
        if self.entropy_mode not in ENTROPY_MODES:
            raise ParameterError(f"entropy_mode must be one of {ENTROPY_MODES}")

    def sample_times(self) -> np.ndarray:
        n = int(math.floor(self.t_final / self.dt + 1e-9)) + 1
        return np.arange(n) * self.dt


@dataclass
class TrajectoryState:
    """Pure-state amplitudes over the sector basis at an absolute time."""

    amplitudes: np.ndarray
    time: float = 0.0


@njit(cache=True)
def _evolve_kernel(eigvals, vecs_c, kick_w, kick_scale, event_times, event_sites,
                   sample_times, c0):
    """Evolve eigenbasis coefficients through timed kicks; return state per sample.

    kick_w[site] is the (dim, r) real block W of eigenvector rows for the
    minority occupation class of `site`; the kick is
    c -> kick_scale * (c - 2 W (W^T c)), an exact sigma^z action.
    """
    dim = c0.shape[0]
    n_samples = sample_times.shape[0]
    r = kick_w.shape[2]
    out = np.empty((n_samples, dim), dtype=np.complex128)
    c = c0.copy()
    t = 0.0
    ei = 0
    n_events = event_times.shape[0]
    proj = np.empty(r, dtype=np.complex128)
    for s in range(n_samples):
        ts = sample_times[s]
        while ei < n_events and event_times[ei] <= ts:
            te = event_times[ei]
            if te > t:
                for k in range(dim):
                    c[k] *= np.exp(-1j * eigvals[k] * (te - t))
                t = te
            w = kick_w[event_sites[ei]]
            for a in range(r):
                acc = 0.0 + 0.0j
                for k in range(dim):
                    acc += w[k, a] * c[k]
                proj[a] = acc
            for k in range(dim):
                acc = c[k]
                for a in range(r):
                    acc -= 2.0 * w[k, a] * proj[a]
                c[k] = kick_scale * acc
            ei += 1
        if ts > t:
            for k in range(dim):
                c[k] *= np.exp(-1j * eigvals[k] * (ts - t))
            t = ts
        out[s] = vecs_c @ c
    return out


def _kick_blocks(ham: SectorHamiltonian):
    """Per-site low-rank kick data (kick_w, kick_scale) in the eigenbasis.

    Every site is occupied in the same number of sector states, so the
    blocks stack into one (n_sites, dim, r) array. With P the projector
    onto the minority class, diag(z_i) = +/-(1 - 2P); the sign lives in
    kick_scale.
    """
    basis = ham.basis
    occ = basis.occupation_matrix().astype(bool)        # (dim, n_sites)
    n_occ = int(occ[:, 0].sum()) if basis.dim else 0
    use_occupied = n_occ * 2 <= basis.dim
    # diag(z) = 2 P_occ - 1 = -(1 - 2 P_occ) = +(1 - 2 P_empty)
    kick_scale = -1.0 if use_occupied else 1.0
    r = n_occ if use_occupied else basis.dim - n_occ
    kick_w = np.zeros((basis.n_sites, basis.dim, max(r, 1)))
    for i in range(basis.n_sites):
        cols = occ[:, i] if use_occupied else ~occ[:, i]
        if r:
            kick_w[i] = ham.eigenvectors[cols, :].T
    return kick_w, kick_scale


def propagate(state: TrajectoryState, ham: SectorHamiltonian, t_target: float) -> TrajectoryState:
    """Exact coherent propagation to t_target via the spectral decomposition."""
    if t_target < state.time:
        raise ParameterError(f"t_target {t_target} is before current time {state.time}")
    if ham.eigenvalues is None:
        diagonalize(ham)
    v = ham.eigenvectors
    c = v.T @ state.amplitudes
    c *= np.exp(-1j * ham.eigenvalues * (t_target - state.time))
    return TrajectoryState(amplitudes=v @ c, time=t_target)


def apply_collision(state: TrajectoryState, basis: SectorBasis, site: int) -> TrajectoryState:
    """sigma^z kick at `site`: amplitude signs follow the site occupation."""
    if not 0 <= site < basis.n_sites:
        raise ParameterError(f"site {site} out of range for {basis.n_sites} sites")
    signs = 2.0 * ((basis.states >> site) & 1) - 1.0
    return TrajectoryState(amplitudes=state.amplitudes * signs, time=state.time)


@dataclass
class EnsembleResult:
    """Trajectory-averaged series; populations are the diagonal of rho(t)."""

    times: np.ndarray
    populations: np.ndarray          # (n_samples, dim)
    conc_mean: np.ndarray            # per-trajectory sum_j |amp_j|^4, mean
    conc_se: np.ndarray              # standard error of the above
    svn: np.ndarray = None           # entropy series (mode-dependent)
    svn_se: np.ndarray = None        # SE, per-trajectory mode only
    rho: np.ndarray = None           # (n_samples, dim, dim) averaged rho
    n_traj: int = 0


class _Accumulator:
    """Fixed-order accumulation so parallel and serial runs agree bitwise."""

    def __init__(self, n_samples, dim, want_entropy, want_rho):
        self.pop = np.zeros((n_samples, dim))
        self.conc = np.zeros(n_samples)
        self.conc_sq = np.zeros(n_samples)
        self.svn = np.zeros(n_samples) if want_entropy else None
        self.svn_sq = np.zeros(n_samples) if want_entropy else None
        self.rho = np.zeros((n_samples, dim, dim), dtype=np.complex128) if want_rho else None
        self.count = 0

    def add_trajectory(self, psi_samples, svn=None):
        p = np.abs(psi_samples) ** 2
        self.pop += p
        conc = np.sum(p * p, axis=1)
        self.conc += conc
        self.conc_sq += conc * conc
        if svn is not None:
            self.svn += svn
            self.svn_sq += svn * svn
        if self.rho is not None:
            self.rho += psi_samples[:, :, None] * psi_samples.conj()[:, None, :]
        self.count += 1

    def merge(self, other):
        self.pop += other.pop
        self.conc += other.conc
        self.conc_sq += other.conc_sq
        if self.svn is not None:
            self.svn += other.svn
            self.svn_sq += other.svn_sq
        if self.rho is not None:
            self.rho += other.rho
        self.count += other.count


def _se(mean_sq, mean, m):
    var = np.maximum(mean_sq - mean**2, 0.0)
    return np.sqrt(var / max(m, 1))


def run_trajectory(ham: SectorHamiltonian, noise: NoiseSpec, ens: EnsembleSpec,
                   psi0: np.ndarray, trajectory_index: int,
                   events=None) -> np.ndarray:
    """One trajectory; returns the state at every sample time, (n_samples, dim).

    `events` overrides the sampled collision schedule with an explicit
    (times, sites) pair; used by oracle tests.
    """
    if ham.eigenvalues is None:
        diagonalize(ham)
    times = ens.sample_times()
    if events is None:
        ev_t, ev_s = generate_events(ham.basis.n_sites, noise, trajectory_index,
                                     horizon=float(times[-1]))
    else:
        ev_t, ev_s = np.asarray(events[0], dtype=np.float64), np.asarray(events[1], dtype=np.int64)
    kick_w, kick_scale = _kick_blocks(ham)
    c0 = ham.eigenvectors.T @ psi0.astype(np.complex128)
    vecs_c = ham.eigenvectors.astype(np.complex128)
    return _evolve_kernel(ham.eigenvalues, vecs_c, kick_w, kick_scale,
                          ev_t, ev_s, times, c0)


def run_ensemble(ham: SectorHamiltonian, noise: NoiseSpec, ens: EnsembleSpec,
                 psi0: np.ndarray, threads: int = 1,
                 collect_rho: bool = False, want_entropy: bool = False) -> EnsembleResult:
    """Average `ens.n_traj` trajectories.

    Deterministic for fixed seeds regardless of `threads`: trajectories are
    grouped into fixed contiguous chunks that are reduced in index order,
    so the floating-point summation order never depends on worker count.
    """
    from .observables import entanglement_entropy_series   # avoids import cycle

    if ham.eigenvalues is None:
        diagonalize(ham)
    times = ens.sample_times()
    dim = ham.basis.dim
    averaged_mode = ens.entropy_mode == "averaged-state"
    want_rho = collect_rho or (want_entropy and averaged_mode)
    per_traj_entropy = want_entropy and not averaged_mode
    if want_entropy and ens.bipartition_cut is None:
        raise ParameterError("entropy requested but bipartition_cut is not set")
    blocks = None
    if want_entropy:
        from .basis import bipartition_factorization
        blocks = bipartition_factorization(ham.basis, ens.bipartition_cut)

    chunk_size = 32
    chunk_ids = range(0, ens.n_traj, chunk_size)

    def run_chunk(start):
        acc = _Accumulator(len(times), dim, per_traj_entropy, want_rho)
        for tr in range(start, min(start + chunk_size, ens.n_traj)):
            psi = run_trajectory(ham, noise, ens, psi0, tr)
            svn = entanglement_entropy_series(psi, blocks) if per_traj_entropy else None
            acc.add_trajectory(psi, svn)
        return acc

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_chunk, chunk_ids))
    else:
        chunks = [run_chunk(s) for s in chunk_ids]

    total = chunks[0]
    for extra in chunks[1:]:
        total.merge(extra)

    m = total.count
    pop = total.pop / m
    conc_mean = total.conc / m
    conc_se = _se(total.conc_sq / m, conc_mean, m)
    rho = total.rho / m if total.rho is not None else None
    svn = svn_se = None
    if per_traj_entropy:
        svn = total.svn / m
        svn_se = _se(total.svn_sq / m, svn, m)
    elif want_entropy:
        from .observables import entanglement_entropy
        svn = np.array([entanglement_entropy(rho[s], blocks=blocks) for s in range(len(times))])
    return EnsembleResult(times=times, populations=pop, conc_mean=conc_mean,
                          conc_se=conc_se, svn=svn, svn_se=svn_se, rho=rho, n_traj=m)
