"""Truncated on-site mean-field Hamiltonian for N two-level atoms in a cavity.

Basis: product states |m excited atoms (symmetric collective state), p photons>
with m in [0, N] and p in [0, n_max].  All energies are expressed in units of
the atom-photon coupling beta, which is fixed to 1.
"""

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "ModelParams",
    "BasisState",
    "SymmetricMatrix",
    "jpjm_eigenvalue",
    "basis_index",
    "basis_states",
    "build_dicke_block",
    "build_mean_field_matrix",
]


def jpjm_eigenvalue(m, N):
    """Eigenvalue m*(N-m+1) of J+J- on the symmetric collective state with m excited atoms."""
    if not (0 <= m <= N):
        raise ValueError(f"m={m} out of range [0, {N}]")
    return m * (N - m + 1)


@dataclass(frozen=True)
class ModelParams:
    """All physical and numerical knobs, as dimensionless ratios (energy unit beta = 1).

    epsilon defaults to omega (resonant atoms).  kappa is the inter-cavity
    photon hopping, mu the chemical potential, psi the real superfluid order
    parameter, z the lattice coordination number multiplying the hopping
    decoupling, n_max the photon-number cutoff.
    """

    N: int = 2
    omega: float = 10.0
    epsilon: float | None = None
    beta: float = 1.0
    kappa: float = 0.0
    mu: float = 0.0
    psi: float = 0.0
    z: int = 1
    n_max: int = 30

    def __post_init__(self):
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", float(self.omega))
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not (isinstance(self.n_max, (int, np.integer)) and self.n_max >= 0):
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max}")
        if not (isinstance(self.z, (int, np.integer)) and self.z >= 1):
            raise ValueError(f"z must be a positive integer, got {self.z}")
        if self.beta != 1.0:
            raise ValueError("beta is the energy unit and must be exactly 1")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.psi < 0:
            raise ValueError(f"psi must be >= 0, got {self.psi}")

    @property
    def dim(self):
        return (self.N + 1) * (self.n_max + 1)


@dataclass(frozen=True)
class BasisState:
    """One symmetric-collective-times-Fock product state: m excited atoms, p photons."""

    m: int
    p: int

    def excitation(self, N):
        """Eigenvalue p + m(N-m+1) of the on-site operator a+a + J+J- on this state."""
        return self.p + jpjm_eigenvalue(self.m, N)


def basis_index(m, p, n_max):
    """Bijective index m*(n_max+1) + p onto [0, (N+1)(n_max+1))."""
    return m * (n_max + 1) + p


def basis_states(N, n_max):
    """All basis states in index order."""
    return [BasisState(m, p) for m in range(N + 1) for p in range(n_max + 1)]


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Real symmetric matrix, exactly symmetric by construction.

    The dense array is assembled from a strictly-upper triangle plus diagonal,
    so entry(i, j) == entry(j, i) holds bitwise.
    """

    array: np.ndarray
    dim: int = field(init=False)
    bandwidth: int = field(init=False)

    def __post_init__(self):
        a = self.array
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        object.__setattr__(self, "dim", a.shape[0])
        nz = np.nonzero(a)
        bw = int(np.max(np.abs(nz[0] - nz[1]))) if nz[0].size else 0
        object.__setattr__(self, "bandwidth", bw)
        a.setflags(write=False)

    @classmethod
    def from_triangle(cls, diag, upper):
        """Build from a diagonal vector and a strictly-upper-triangular array."""
        a = np.diag(np.asarray(diag, dtype=float)) + upper + upper.T
        return cls(a)

    def entry(self, i, j):
        return self.array[i, j]


def _block_members(n, N):
    """States of the fixed-excitation manifold n = m + p, ordered by descending m.

    For n >= N the box is the full (N+1)-state ladder; for n < N it is
    rectangular-truncated to photon numbers p >= 0.
    """
    return [(m, n - m) for m in range(min(N, n), -1, -1)]


def build_dicke_block(n, params: ModelParams) -> SymmetricMatrix:
    """One fixed-excitation box of the on-site Hamiltonian (no hopping terms).

    Diagonal (m, p): eps*lam(m) + omega*p - mu*(p + lam(m)) with
    lam(m) = m(N-m+1); coupling between (m, p) and (m-1, p+1): sqrt(p+1)*sqrt(lam(m)).
    """
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    N, eps, omega, mu = params.N, params.epsilon, params.omega, params.mu
    members = _block_members(n, N)
    dim = len(members)
    diag = np.empty(dim)
    upper = np.zeros((dim, dim))
    for i, (m, p) in enumerate(members):
        lam = jpjm_eigenvalue(m, N)
        diag[i] = eps * lam + omega * p - mu * (p + lam)
        if i + 1 < dim:
            # next row is (m-1, p+1)
            upper[i, i + 1] = math.sqrt(p + 1) * math.sqrt(lam)
    return SymmetricMatrix.from_triangle(diag, upper)


def build_mean_field_matrix(params: ModelParams) -> SymmetricMatrix:
    """Full truncated mean-field matrix in the index map m*(n_max+1) + p.

    Adds to the boxes of build_dicke_block the hopping decoupling: the scalar
    z*kappa*psi**2 on every diagonal entry and -z*kappa*psi*sqrt(p+1) between
    (m, p) and (m, p+1).
    """
    return _assemble_dense(params, params.psi)


def _assemble_dense(params: ModelParams, psi) -> SymmetricMatrix:
    # psi passed separately so the spectrum symmetry under psi -> -psi can be
    # exercised without violating the psi >= 0 parameter invariant.
    N, n_max = params.N, params.n_max
    eps, omega, mu = params.epsilon, params.omega, params.mu
    zk = params.z * params.kappa
    dim = params.dim
    diag = np.empty(dim)
    upper = np.zeros((dim, dim))
    for m in range(N + 1):
        lam = jpjm_eigenvalue(m, N)
        for p in range(n_max + 1):
            i = basis_index(m, p, n_max)
            diag[i] = eps * lam + omega * p - mu * (p + lam) + zk * psi * psi
            if p + 1 <= n_max:
                upper[i, basis_index(m, p + 1, n_max)] = -zk * psi * math.sqrt(p + 1)
    for m in range(1, N + 1):
        lam = jpjm_eigenvalue(m, N)
        for p in range(n_max):
            # atom-photon ladder (m, p) <-> (m-1, p+1); the second index is the smaller one
            i = basis_index(m, p, n_max)
            j = basis_index(m - 1, p + 1, n_max)
            upper[j, i] = math.sqrt(p + 1) * math.sqrt(lam)
    return SymmetricMatrix.from_triangle(diag, upper)


class MeanFieldBands:
    """Banded (p-major) view of the mean-field matrix for fast repeated solves.

    Row 0 is the diagonal without the psi-dependent pieces, row N the
    atom-photon couplings, row N+1 the hopping amplitudes -z*kappa*sqrt(p+1)
    to be scaled by psi.  Layout matches scipy's lower banded storage.
    """

    def __init__(self, params: ModelParams):
        N, n_max = params.N, params.n_max
        eps, omega, mu = params.epsilon, params.omega, params.mu
        dim = (N + 1) * (n_max + 1)
        base = np.zeros((N + 2, dim))
        hop = np.zeros(dim)
        for p in range(n_max + 1):
            for m in range(N + 1):
                j = p * (N + 1) + m
                lam = jpjm_eigenvalue(m, N)
                base[0, j] = eps * lam + omega * p - mu * (p + lam)
                if p < n_max:
                    if m >= 1:
                        base[N, j] = math.sqrt(p + 1) * math.sqrt(lam)
                    hop[j] = -params.z * params.kappa * math.sqrt(p + 1)
        self.params = params
        self.dim = dim
        self._base = base
        self._hop = hop
        self._zkappa = params.z * params.kappa

    def at_psi(self, psi):
        """Lower banded array of the mean-field matrix at order parameter psi."""
        ab = self._base.copy()
        ab[-1, :] = psi * self._hop
        ab[0, :] += self._zkappa * psi * psi
        return ab

    def pmajor_to_mmajor(self, vector):
        """Reorder a p-major eigenvector into the public m*(n_max+1)+p index map."""
        N, n_max = self.params.N, self.params.n_max
        out = np.empty_like(vector)
        for p in range(n_max + 1):
            for m in range(N + 1):
                out[basis_index(m, p, n_max)] = vector[p * (N + 1) + m]
        return out
