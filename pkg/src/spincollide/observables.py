"""Localization observables: IPR, IER, site densities, imbalance, entropy.

IER is implemented as the sum of squared sector-basis populations, the
basis generalization of the IPR; it equals 1 on a single configuration
and 1/dim on the uniform ergodic mixture. Entropies use the natural log
by default, with 0*log 0 = 0 and reduced-density eigenvalues below 1e-14
clamped to zero.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BipartitionBlocks, SectorBasis, bipartition_factorization
from .errors import ParameterError

EIG_CLAMP = 1e-14


def ier(populations: np.ndarray) -> np.ndarray:
    """Sum of squared populations over the sector basis (any q)."""
    p = np.asarray(populations)
    return np.sum(p * p, axis=-1)


def ipr(populations: np.ndarray, n_exc: int = 1) -> np.ndarray:
    """Single-excitation inverse participation ratio; use ier() for q != 1."""
    if n_exc != 1:
        raise ParameterError("IPR is defined for the single-excitation sector; use ier()")
    return ier(populations)


def site_density(populations: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Per-site excitation density n_i = (1 + <sigma_i^z>)/2; rows sum to q."""
    return np.asarray(populations) @ basis.occupation_matrix()


def imbalance(site_density_row: np.ndarray, center: int, n_sites: int, n_exc: int):
    """Central-site excess density n_c - q/N."""
    return np.asarray(site_density_row)[..., center] - n_exc / n_sites


def _entropy_from_probs(p: np.ndarray, base: float = math.e) -> float:
    p = p[p > EIG_CLAMP]
    s = float(-np.sum(p * np.log(p)))
    return s / math.log(base) if base != math.e else s


def entanglement_entropy(state_or_rho: np.ndarray, basis: SectorBasis = None,
                         cut: int = None, blocks: BipartitionBlocks = None,
                         base: float = math.e) -> float:
    """Von Neumann entropy of the left block of a bipartition.

    Accepts a pure state vector or a density matrix over the sector basis.
    rho_A is block-diagonal in the left excitation count, so its spectrum
    is assembled blockwise from the factorization.
    """
    if blocks is None:
        if basis is None or cut is None:
            raise ParameterError("need either precomputed blocks or (basis, cut)")
        blocks = bipartition_factorization(basis, cut)
    arr = np.asarray(state_or_rho)
    if arr.ndim == 1:
        if abs(np.linalg.norm(arr) - 1.0) > 1e-6:
            raise ParameterError("state is not normalized")
        probs = []
        for blk in blocks.blocks:
            a = arr[blk.index]
            sv = np.linalg.svd(a, compute_uv=False)
            probs.append(sv * sv)
        return _entropy_from_probs(np.concatenate(probs), base)
    if abs(np.trace(arr).real - 1.0) > 1e-6:
        raise ParameterError("density matrix is not trace-normalized")
    probs = []
    for blk in blocks.blocks:
        idx = blk.index
        # (rho_A)_{l l'} = sum_r rho[idx[l, r], idx[l', r]]
        sub = arr[idx[:, None, :], idx[None, :, :]]     # (nl, nl, nr)
        rho_a = np.sum(sub, axis=2)
        probs.append(np.linalg.eigvalsh(rho_a))
    p = np.concatenate(probs)
    if p.min() < -1e-10:
        raise ParameterError("reduced density matrix has a significantly negative eigenvalue")
    return _entropy_from_probs(np.clip(p, 0.0, None), base)


def entanglement_entropy_series(psi_samples: np.ndarray, blocks: BipartitionBlocks,
                                base: float = math.e) -> np.ndarray:
    """Pure-state entropy at every sample, batched blockwise over time."""
    n_samples = psi_samples.shape[0]
    ent = np.zeros(n_samples)
    for blk in blocks.blocks:
        a = psi_samples[:, blk.index]                   # (n_samples, nl, nr)
        sv = np.linalg.svd(a, compute_uv=False)
        p = sv * sv
        mask = p > EIG_CLAMP
        terms = np.where(mask, -p * np.log(np.where(mask, p, 1.0)), 0.0)
        ent += np.sum(terms, axis=1)
    if base != math.e:
        ent /= math.log(base)
    return ent


@dataclass
class ObservableSeries:
    """Time grid with the derived localization observables."""

    times: np.ndarray
    populations: np.ndarray
    site_density: np.ndarray
    ier: np.ndarray
    ipr: np.ndarray = None           # q = 1 only (coincides with ier there)
    imb: np.ndarray = None
    svn: np.ndarray = None
    svn_se: np.ndarray = None
    traj_conc_se: np.ndarray = None  # per-trajectory concentration SE
    metadata: dict = field(default_factory=dict)


def build_series(result, basis: SectorBasis, center_site: int = None,
                 metadata: dict = None) -> ObservableSeries:
    """Derive the observable series from an EnsembleResult."""
    pops = result.populations
    nd = site_density(pops, basis)
    ier_series = ier(pops)
    ipr_series = ier_series if basis.n_exc == 1 else None
    imb_series = None
    if center_site is not None:
        imb_series = imbalance(nd, center_site, basis.n_sites, basis.n_exc)
    return ObservableSeries(times=result.times, populations=pops,
                            site_density=nd, ier=ier_series, ipr=ipr_series,
                            imb=imb_series, svn=result.svn, svn_se=result.svn_se,
                            traj_conc_se=result.conc_se,
                            metadata=dict(metadata or {}))
