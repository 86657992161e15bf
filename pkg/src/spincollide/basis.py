"""Fixed-excitation-number basis of an N-site spin-1/2 chain.

Basis states are N-bit occupation patterns (bit i set = excitation at
site i, site 0 leftmost), listed in ascending integer order so that
ranking is reproducible across runs and platforms.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError, ParameterError

MAX_BASIS_DIM = 10**6


def _patterns(n_bits: int, n_set: int) -> np.ndarray:
    """All n_bits-wide patterns with n_set bits set, ascending."""
    dim = comb(n_bits, n_set)
    out = np.empty(dim, dtype=np.int64)
    if dim == 0:
        return out
    x = (1 << n_set) - 1
    for i in range(dim):
        out[i] = x
        if i + 1 < dim:
            # Gosper's hack: next integer with the same popcount
            u = x & -x
            v = x + u
            x = v | (((x ^ v) // u) >> 2)
    return out


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of the q-excitation magnetization sector."""

    n_sites: int
    n_exc: int
    states: np.ndarray                      # ascending int64 patterns
    index_of: dict = field(repr=False)      # pattern -> ordinal

    @property
    def dim(self) -> int:
        return len(self.states)

    def occupation_matrix(self) -> np.ndarray:
        """(dim, n_sites) 0/1 array: entry [j, i] = occupation of site i in state j."""
        sites = np.arange(self.n_sites)
        return ((self.states[:, None] >> sites[None, :]) & 1).astype(np.float64)


def build_basis(n_sites: int, n_exc: int) -> SectorBasis:
    if n_sites < 1:
        raise ParameterError(f"n_sites must be >= 1, got {n_sites}")
    if not 0 <= n_exc <= n_sites:
        raise ParameterError(f"n_exc must be in [0, {n_sites}], got {n_exc}")
    dim = comb(n_sites, n_exc)
    if dim > MAX_BASIS_DIM:
        raise CapacityError(f"sector dimension {dim} exceeds limit {MAX_BASIS_DIM}")
    states = _patterns(n_sites, n_exc)
    index_of = {int(p): j for j, p in enumerate(states)}
    return SectorBasis(n_sites=n_sites, n_exc=n_exc, states=states, index_of=index_of)


def rank(basis: SectorBasis, pattern: int) -> int:
    """Ordinal of `pattern` in the basis ordering."""
    if int(pattern).bit_count() != basis.n_exc or pattern >> basis.n_sites:
        raise ParameterError(
            f"pattern {pattern:#b} is not an {basis.n_sites}-bit state with {basis.n_exc} excitations"
        )
    return basis.index_of[int(pattern)]


def unrank(basis: SectorBasis, ordinal: int) -> int:
    if not 0 <= ordinal < basis.dim:
        raise ParameterError(f"ordinal {ordinal} out of range for dim {basis.dim}")
    return int(basis.states[ordinal])


@dataclass(frozen=True)
class BipartitionBlock:
    """One left-excitation-count block of the bipartite factorization."""

    k_left: int
    left_patterns: np.ndarray     # patterns on sites [0, cut)
    right_patterns: np.ndarray    # patterns on sites [cut, N), shifted down by cut
    index: np.ndarray             # (n_left, n_right) global basis ordinals


@dataclass(frozen=True)
class BipartitionBlocks:
    cut: int
    blocks: tuple

    def total_states(self) -> int:
        return sum(b.index.size for b in self.blocks)


def bipartition_factorization(basis: SectorBasis, cut: int) -> BipartitionBlocks:
    """Factor the sector basis across the cut left [0, cut) / right [cut, N).

    The q-excitation sector decomposes into blocks labeled by the number k
    of excitations on the left; within a block every (left, right) pattern
    pair maps to one global basis state.
    """
    n, q = basis.n_sites, basis.n_exc
    if not 0 < cut < n:
        raise ParameterError(f"cut must be in (0, {n}), got {cut}")
    n_right = n - cut
    blocks = []
    for k in range(max(0, q - n_right), min(q, cut) + 1):
        left = _patterns(cut, k)
        right = _patterns(n_right, q - k)
        index = np.empty((len(left), len(right)), dtype=np.int64)
        for a, lp in enumerate(left):
            for b, rp in enumerate(right):
                index[a, b] = basis.index_of[int(lp) | (int(rp) << cut)]
        blocks.append(BipartitionBlock(k_left=k, left_patterns=left,
                                       right_patterns=right, index=index))
    return BipartitionBlocks(cut=cut, blocks=tuple(blocks))
