"""Closed-form two-atom resonance analytics and the zero-hopping lobe boundary solver.

Closed forms hold for N = 2 with equal atomic and field frequencies
(x = omega/beta); off-resonance and other atom numbers go through the numeric
path in `hamiltonian`/`eig`.
"""

from dataclasses import dataclass
import math

import numpy as np

from .hamiltonian import ModelParams, build_dicke_block
from . import eig

__all__ = [
    "DressedTriple",
    "BoundaryNotFoundError",
    "rabi",
    "dressed_triple",
    "critical_mu_formula",
    "lobe_boundary_zero_hopping",
]

# mu-scan resolution used to bracket the block-degeneracy root before bisecting
_SCAN_STEP = 0.01
_BISECT_TOL = 1e-10


class BoundaryNotFoundError(RuntimeError):
    """No manifold degeneracy in the scanned chemical-potential bracket (lobe absent)."""


def rabi(n, x):
    """Effective Rabi splitting sqrt(8(2n-1) + x^2) between the outer branches of manifold n."""
    if n < 1:
        raise ValueError(f"manifold index must be >= 1, got {n}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    return math.sqrt(8.0 * (2 * n - 1) + x * x)


@dataclass(frozen=True, eq=False)
class DressedTriple:
    """Branch energies and eigenvectors of one fixed-excitation manifold (N = 2, resonance).

    Vectors are over the descending-m basis (both atoms excited, one excited,
    none excited).  Manifold 1 has only two basis states, so e_zero/v_zero are
    None and the outer vectors have length 2; manifold 0 is the single vacuum
    state carried by the center branch at energy 0.
    """

    n: int
    e_minus: float | None
    e_zero: float | None
    e_plus: float | None
    v_minus: np.ndarray | None
    v_zero: np.ndarray | None
    v_plus: np.ndarray | None


def dressed_triple(n, x) -> DressedTriple:
    """Branch energies (closed form) and numerically diagonalized eigenvectors of manifold n."""
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    if n == 0:
        return DressedTriple(0, None, 0.0, None, None, np.array([1.0]), None)
    e_minus = ((2 * n + 1) * x - rabi(n, x)) / 2.0
    e_plus = ((2 * n + 1) * x + rabi(n, x)) / 2.0
    block = build_dicke_block(n, ModelParams(N=2, omega=x, epsilon=x, n_max=max(n, 1)))
    w, v = np.linalg.eigh(block.array)
    vecs = [eig._fix_sign(v[:, k]) for k in range(v.shape[1])]
    if n == 1:
        return DressedTriple(1, e_minus, None, e_plus, vecs[0], None, vecs[1])
    return DressedTriple(n, e_minus, n * float(x), e_plus, vecs[0], vecs[1], vecs[2])


def critical_mu_formula(n, x):
    """Closed-form critical chemical potential for the n -> n+1 filling change.

    Defined for n >= 2 only (the denominator vanishes at n = 1).  The numeric
    alternative for any n is lobe_boundary_zero_hopping; the two are reported
    side by side and differ systematically, see the mu-crit output.
    """
    if n <= 1:
        raise ValueError(
            f"closed form requires n >= 2 (got n={n}); use lobe_boundary_zero_hopping"
        )
    num = (math.sqrt(n - 1) - math.sqrt(n)) * x - (
        math.sqrt(n - 1) * rabi(n + 1, x) - math.sqrt(n) * rabi(n, x)
    )
    return num / (2.0 * math.sqrt(2.0 * n * (n - 1)))


def _block_ground(n, x, mu, N=2):
    if n == 0:
        # single vacuum state at energy 0 for every mu
        return 0.0
    block = build_dicke_block(n, ModelParams(N=N, omega=x, epsilon=x, mu=mu, n_max=max(n, 1)))
    return float(np.linalg.eigvalsh(block.array)[0])


def lobe_boundary_zero_hopping(n, x, N=2):
    """Chemical potential where the manifold-n and manifold-(n+1) block ground energies cross.

    Scans mu over [0, x] in steps of 0.01 to bracket the unique crossing, then
    bisects to |dmu| <= 1e-10.  Raises BoundaryNotFoundError when no crossing
    lies in the bracket, which signals that the lobe is absent at this x.
    """
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    if x <= 0:
        raise ValueError(f"x must be > 0, got {x}")

    def gap(mu):
        return _block_ground(n + 1, x, mu, N) - _block_ground(n, x, mu, N)

    n_steps = int(math.ceil(x / _SCAN_STEP))
    mus = np.linspace(0.0, x, n_steps + 1)
    g_prev = gap(mus[0])
    if g_prev == 0.0:
        return float(mus[0])
    bracket = None
    for mu in mus[1:]:
        g = gap(mu)
        if g == 0.0:
            return float(mu)
        if g_prev * g < 0:
            bracket = (mu - (mus[1] - mus[0]), mu, g_prev, g)
            break
        g_prev = g
    if bracket is None:
        raise BoundaryNotFoundError(
            f"no manifold {n}->{n + 1} degeneracy for mu in [0, {x}] (lobe absent)"
        )
    lo, hi, g_lo, _ = bracket
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0.0:
            return float(mid)
        if g_lo * g_mid < 0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)
