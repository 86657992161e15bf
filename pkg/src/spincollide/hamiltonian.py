"""Sector-restricted disordered XXZ chain Hamiltonian.

Pauli-operator convention: hopping elements are exactly 2J, the Ising
diagonal is J*Delta*sum(z_i z_{i+1}) with z = +/-1, plus the local field
term sum(h_i z_i). Open boundary conditions.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis
from .errors import CapacityError, DiagonalizationError, ParameterError

DEFAULT_DIM_CAP = 5000


def draw_disorder(n_sites: int, h: float, disorder_seed: int) -> np.ndarray:
    """Per-site fields h_i, i.i.d. uniform on [-h, h].

    Deterministic in (disorder_seed, n_sites, h); generator is numpy PCG64
    seeded via SeedSequence(disorder_seed), so identical seeds give
    identical fields on every platform.
    """
    if h < 0:
        raise ParameterError(f"disorder half-width h must be >= 0, got {h}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(disorder_seed)))
    return rng.uniform(-h, h, size=n_sites)


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameters of the chain; energies in units of J."""

    n_sites: int
    j: float = 1.0
    delta: float = 0.0
    h: float = 0.0
    disorder_seed: int = 0
    fields: np.ndarray = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ParameterError(f"n_sites must be >= 1, got {self.n_sites}")
        if self.fields is None:
            object.__setattr__(self, "fields",
                               draw_disorder(self.n_sites, self.h, self.disorder_seed))
        fields = np.asarray(self.fields, dtype=np.float64)
        if fields.shape != (self.n_sites,):
            raise ParameterError(f"fields must have length {self.n_sites}")
        object.__setattr__(self, "fields", fields)


@dataclass
class SectorHamiltonian:
    basis: SectorBasis
    matrix: np.ndarray
    eigenvalues: np.ndarray = None
    eigenvectors: np.ndarray = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_hamiltonian(basis: SectorBasis, spec: ChainSpec,
                      dim_cap: int = DEFAULT_DIM_CAP) -> SectorHamiltonian:
    """Assemble the dense symmetric sector matrix of the XXZ Hamiltonian."""
    if basis.n_sites != spec.n_sites:
        raise ParameterError(
            f"basis has {basis.n_sites} sites but spec has {spec.n_sites}")
    dim = basis.dim
    if dim > dim_cap:
        raise CapacityError(f"sector dimension {dim} exceeds cap {dim_cap}")

    n = basis.n_sites
    occ = basis.occupation_matrix()          # (dim, n) in {0, 1}
    z = 2.0 * occ - 1.0                      # (dim, n) in {-1, +1}

    # diagonal: J*Delta * sum z_i z_{i+1}  +  sum h_i z_i
    diag = spec.j * spec.delta * np.sum(z[:, :-1] * z[:, 1:], axis=1) + z @ spec.fields

    mat = np.zeros((dim, dim))
    mat[np.diag_indices(dim)] = diag

    # hopping: sigma^x sigma^x + sigma^y sigma^y on bond (i, i+1) moves one
    # excitation between adjacent sites with amplitude 2J
    for j_idx, pat in enumerate(basis.states):
        p = int(pat)
        for i in range(n - 1):
            pair = (p >> i) & 3
            if pair == 1 or pair == 2:       # exactly one of the two sites occupied
                p2 = p ^ (3 << i)
                j2 = basis.index_of[p2]
                if j2 > j_idx:
                    mat[j_idx, j2] = 2.0 * spec.j
                    mat[j2, j_idx] = 2.0 * spec.j
    return SectorHamiltonian(basis=basis, matrix=mat)


def diagonalize(ham: SectorHamiltonian) -> SectorHamiltonian:
    """Populate eigenvalues (ascending) and orthonormal eigenvectors in place."""
    try:
        vals, vecs = np.linalg.eigh(ham.matrix)
    except np.linalg.LinAlgError as exc:
        raise DiagonalizationError(ham.dim, str(exc)) from exc
    ham.eigenvalues = vals
    ham.eigenvectors = vecs
    return ham


def full_space_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense 2^N Kronecker-product Hamiltonian; brute-force oracle for small N.

    Qubit i is the factor at Kronecker position i counted from the right,
    so computational-basis index == occupation pattern.
    """
    n = spec.n_sites
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    sz = np.array([[-1.0, 0.0], [0.0, 1.0]])   # |1> (occupied) has z = +1
    eye = np.eye(2)

    def site_op(op, i):
        out = np.array([[1.0 + 0.0j]])
        for k in range(n):
            out = np.kron(op if k == i else eye, out)
        return out

    dim = 2**n
    ham = np.zeros((dim, dim), dtype=complex)
    for i in range(n - 1):
        ham += spec.j * (site_op(sx, i) @ site_op(sx, i + 1)
                         + site_op(sy, i) @ site_op(sy, i + 1)
                         + spec.delta * site_op(sz, i) @ site_op(sz, i + 1))
    for i in range(n):
        ham += spec.fields[i] * site_op(sz, i)
    return ham
