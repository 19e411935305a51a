"""Self-consistent mean-field solution at a single parameter point.

The ground energy is minimized over the real order parameter psi; the phase
is labeled by whether the minimizing psi exceeds a small threshold, and the
mean excitation density follows from the mu-derivative of the ground energy.
"""

from dataclasses import dataclass, replace
import enum
import math

import numpy as np

from .hamiltonian import ModelParams, MeanFieldBands, jpjm_eigenvalue
from . import eig

__all__ = [
    "Phase",
    "MeanFieldSolution",
    "DensityProbe",
    "ground_energy_at_psi",
    "minimize_over_psi",
    "mean_excitations",
    "density_probe",
    "convergence_study",
    "first_converged",
    "ground_manifold_weights",
]

PSI_THRESHOLD = 1e-4          # psi* above this is labeled superfluid
TRUNCATION_GUARD = 1e-6       # max tolerated ground-state weight on the p = n_max layer
COARSE_POINTS = 200           # psi-scan resolution before golden-section refinement
PSI_TOL = 1e-8                # golden-section bracket width
RHO_DELTA = 1e-4              # central-difference step for the mu-derivative
ENERGY_TIE = 1e-12            # energies this close count as a tie, resolved toward psi = 0;
                              # above eigensolver noise, far below every physics tolerance

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Phase(enum.Enum):
    MottInsulator = "MI"
    Superfluid = "SF"


@dataclass(frozen=True, eq=False)
class MeanFieldSolution:
    psi_min: float
    e_ground: float
    rho: float
    phase: Phase
    n_max_used: int
    converged: bool
    top_manifold_weight: float


@dataclass(frozen=True)
class DensityProbe:
    """Central-difference density with the order parameters at the shifted points.

    discontinuous is set when the two shifted points land on different sides
    of a phase boundary (psi jump above 0.1), where the derivative is not
    meaningful.
    """

    rho: float
    psi_lo: float
    psi_hi: float
    discontinuous: bool


def ground_energy_at_psi(params: ModelParams) -> float:
    """Smallest eigenvalue of the mean-field matrix, including the z*kappa*psi^2 shift."""
    bands = MeanFieldBands(params)
    return eig.ground_value_banded(bands.at_psi(params.psi))


def _golden_min(f, a, b, tol):
    """Golden-section minimum of f on [a, b]; returns the evaluated (x, f(x)) pairs' best."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        cand = (c, fc) if fc <= fd else (d, fd)
        if cand[1] < best[1] or (cand[1] == best[1] and cand[0] < best[0]):
            best = cand
    return best


def minimize_over_psi(params: ModelParams) -> MeanFieldSolution:
    """Minimize the ground energy over psi in [0, sqrt(n_max)].

    Coarse scan on COARSE_POINTS points followed by golden-section refinement
    to PSI_TOL; ties are broken toward smaller psi, so the Mott label is the
    conservative outcome.  A result whose ground vector leaks more than
    TRUNCATION_GUARD onto the top photon layer is returned with
    converged=False.
    """
    bands = MeanFieldBands(params)

    def energy(psi):
        return eig.ground_value_banded(bands.at_psi(psi))

    psi_max = math.sqrt(max(params.n_max, 1))
    grid = np.linspace(0.0, psi_max, COARSE_POINTS)
    energies = np.array([energy(p) for p in grid])
    i = int(np.argmin(energies))
    e0 = energies[0]
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, COARSE_POINTS - 1)]
    psi_star, e_star = _golden_min(energy, lo, hi, PSI_TOL)
    if e0 <= e_star + ENERGY_TIE:
        psi_star, e_star = 0.0, e0
    pair = eig.ground_pair_banded(bands.at_psi(psi_star))
    weights = pair.vector ** 2
    N, n_max = params.N, params.n_max
    top_weight = float(weights[n_max * (N + 1):].sum())
    lam = np.array([jpjm_eigenvalue(m, N) for m in range(N + 1)])
    excitation = (np.arange(n_max + 1)[:, None] + lam[None, :]).ravel()
    rho = float(weights @ excitation)
    phase = Phase.Superfluid if psi_star > PSI_THRESHOLD else Phase.MottInsulator
    return MeanFieldSolution(
        psi_min=psi_star,
        e_ground=pair.value,
        rho=rho,
        phase=phase,
        n_max_used=n_max,
        converged=top_weight <= TRUNCATION_GUARD,
        top_manifold_weight=top_weight,
    )


def density_probe(params: ModelParams) -> DensityProbe:
    """Central difference [E(mu-d) - E(mu+d)] / 2d with psi re-minimized at both points."""
    lo = minimize_over_psi(replace(params, mu=params.mu - RHO_DELTA))
    hi = minimize_over_psi(replace(params, mu=params.mu + RHO_DELTA))
    rho = (lo.e_ground - hi.e_ground) / (2.0 * RHO_DELTA)
    return DensityProbe(
        rho=rho,
        psi_lo=lo.psi_min,
        psi_hi=hi.psi_min,
        discontinuous=abs(hi.psi_min - lo.psi_min) > 0.1,
    )


def mean_excitations(params: ModelParams) -> float:
    """Mean excitations per site, -dE_g/dmu at the minimizing psi."""
    return density_probe(params).rho


def convergence_study(params: ModelParams, cutoffs) -> list[tuple[int, float]]:
    """Ground energy at each photon cutoff; the sequence is variational (nonincreasing)."""
    cutoffs = list(cutoffs)
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    out = []
    for n_max in cutoffs:
        sol = minimize_over_psi(replace(params, n_max=n_max))
        out.append((n_max, sol.e_ground))
    return out


def first_converged(points, tol=1e-8):
    """First cutoff whose energy moved by less than tol from the previous one, or None."""
    for (_, e_prev), (n_max, e) in zip(points, points[1:]):
        if abs(e - e_prev) < tol:
            return n_max
    return None


def ground_manifold_weights(params: ModelParams) -> np.ndarray:
    """Ground-vector probability per fixed-excitation manifold n = m + p (length N + n_max + 1)."""
    bands = MeanFieldBands(params)
    pair = eig.ground_pair_banded(bands.at_psi(params.psi))
    N, n_max = params.N, params.n_max
    weights = np.zeros(N + n_max + 1)
    w = pair.vector ** 2
    for p in range(n_max + 1):
        for m in range(N + 1):
            weights[m + p] += w[p * (N + 1) + m]
    return weights
