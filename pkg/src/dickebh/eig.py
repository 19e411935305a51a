"""Real symmetric eigensolver services: ground state and full spectrum."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .hamiltonian import SymmetricMatrix

__all__ = ["EigenPair", "SolverError", "ground_state", "full_spectrum"]

# Above this dimension switch from a dense decomposition to an iterative
# extremal-eigenvalue solver; every case in the target parameter ranges
# (e.g. N=10, n_max=30 -> dim 341) stays dense.
DENSE_LIMIT = 2000

RESIDUAL_TOL = 1e-9


class SolverError(RuntimeError):
    """Eigensolver failed to converge; carries the underlying diagnostics."""


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Eigenvalue with unit-norm eigenvector, sign-fixed for determinism."""

    value: float
    vector: np.ndarray


def _as_array(A):
    return A.array if isinstance(A, SymmetricMatrix) else np.asarray(A, dtype=float)


def _fix_sign(v):
    """First component of largest magnitude made positive."""
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        return -v
    return v


def ground_state(A) -> EigenPair:
    """Algebraically smallest eigenvalue and eigenvector of a symmetric matrix."""
    a = _as_array(A)
    dim = a.shape[0]
    try:
        if dim <= DENSE_LIMIT:
            w, v = scipy.linalg.eigh(a, subset_by_index=[0, 0])
            value, vector = float(w[0]), v[:, 0]
        else:
            w, v = scipy.sparse.linalg.eigsh(
                scipy.sparse.csr_matrix(a), k=1, which="SA",
                maxiter=10 * dim, tol=1e-10,
            )
            value, vector = float(w[0]), v[:, 0]
    except Exception as err:  # LinAlgError / ArpackNoConvergence
        raise SolverError(f"ground-state solve failed for dim={dim}: {err}") from err
    vector = _fix_sign(vector / np.linalg.norm(vector))
    residual = np.linalg.norm(a @ vector - value * vector)
    scale = max(1.0, np.linalg.norm(a, np.inf))
    if residual > RESIDUAL_TOL * scale:
        raise SolverError(
            f"ground-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}*{scale:.3e}"
        )
    return EigenPair(value, vector)


def full_spectrum(A) -> np.ndarray:
    """All eigenvalues in nondecreasing order."""
    a = _as_array(A)
    try:
        w = scipy.linalg.eigvalsh(a)
    except Exception as err:
        raise SolverError(f"spectrum solve failed for dim={a.shape[0]}: {err}") from err
    return w


def ground_value_banded(ab) -> float:
    """Smallest eigenvalue from a lower banded array (hot path for psi scans)."""
    try:
        w = scipy.linalg.eigvals_banded(ab, lower=True, select="i", select_range=(0, 0))
    except Exception as err:
        raise SolverError(f"banded ground solve failed: {err}") from err
    return float(w[0])


def ground_pair_banded(ab) -> EigenPair:
    """Smallest eigenpair from a lower banded array (vector in the band's ordering)."""
    try:
        w, v = scipy.linalg.eig_banded(ab, lower=True, select="i", select_range=(0, 0))
    except Exception as err:
        raise SolverError(f"banded ground solve failed: {err}") from err
    vector = _fix_sign(v[:, 0] / np.linalg.norm(v[:, 0]))
    return EigenPair(float(w[0]), vector)
