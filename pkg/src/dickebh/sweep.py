"""Parameter-grid engine: phase diagrams, density maps, lobe boundaries and tips.

Grid cells are independent work items; results are gathered by cell index so
the output is identical for any worker count.
"""

from dataclasses import dataclass, field, replace
import math
import multiprocessing

import numpy as np

from .hamiltonian import ModelParams
from .meanfield import Phase, MeanFieldSolution, minimize_over_psi, density_probe
from .dressed import _block_ground
from . import _contours

__all__ = [
    "GridSpec",
    "PhaseGrid",
    "LobeTip",
    "run_phase_diagram",
    "run_density_map",
    "extract_lobe_boundary",
    "lobe_tip_scaling",
    "zero_hopping_intervals",
]

PSI_FLOOR = 1e-12  # added before taking log10 for contour stability
CONTOUR_LEVEL_PSI = 1e-4  # matches the meanfield phase threshold


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sweep over hopping kappa/beta and relative chemical potential (mu-omega)/beta."""

    kappa_min: float
    kappa_max: float
    mu_rel_min: float
    mu_rel_max: float
    nk: int
    nmu: int
    params_base: ModelParams

    def __post_init__(self):
        if self.kappa_min < 0 or self.kappa_min > self.kappa_max:
            raise ValueError("require 0 <= kappa_min <= kappa_max")
        if self.mu_rel_min > self.mu_rel_max:
            raise ValueError("require mu_rel_min <= mu_rel_max")
        if self.nk < 2 or self.nmu < 2:
            raise ValueError("grid needs nk, nmu >= 2")

    def kappa_axis(self):
        return np.linspace(self.kappa_min, self.kappa_max, self.nk)

    def mu_rel_axis(self):
        return np.linspace(self.mu_rel_min, self.mu_rel_max, self.nmu)

    def cell_params(self, i, j):
        kappa = self.kappa_axis()[i]
        mu = self.params_base.omega + self.mu_rel_axis()[j]
        return replace(self.params_base, kappa=float(kappa), mu=float(mu))


@dataclass(frozen=True)
class LobeTip:
    n: int | None  # ground manifold of the lobe, None if labeling failed
    kappa_tip: float
    mu_rel_interval: tuple[float, float]  # mu extent of the lobe within the window
    tip_at_window_edge: bool  # kappa extent clipped by kappa_max


@dataclass(eq=False)
class PhaseGrid:
    spec: GridSpec
    cells: list  # nk x nmu nested lists of MeanFieldSolution (None where a cell failed)
    boundaries: list = field(default_factory=list)  # polylines in (kappa, mu_rel)
    lobe_tips: list = field(default_factory=list)  # LobeTip per boundary polyline
    failures: list = field(default_factory=list)  # (i, j, message)
    rho_discontinuous: list = field(default_factory=list)  # (i, j) cells straddling a boundary

    def psi_field(self):
        return self._field("psi_min")

    def rho_field(self):
        return self._field("rho")

    def _field(self, name):
        out = np.full((self.spec.nk, self.spec.nmu), np.nan)
        for i in range(self.spec.nk):
            for j in range(self.spec.nmu):
                cell = self.cells[i][j]
                if cell is not None:
                    out[i, j] = getattr(cell, name)
        return out


def _solve_cell(task):
    i, j, spec, with_density = task
    params = spec.cell_params(i, j)
    try:
        sol = minimize_over_psi(params)
        flag = False
        if with_density:
            probe = density_probe(params)
            sol = MeanFieldSolution(
                psi_min=sol.psi_min,
                e_ground=sol.e_ground,
                rho=probe.rho,
                phase=sol.phase,
                n_max_used=sol.n_max_used,
                converged=sol.converged,
                top_manifold_weight=sol.top_manifold_weight,
            )
            flag = probe.discontinuous
        return i, j, sol, flag, None
    except Exception as err:
        return i, j, None, False, f"{type(err).__name__}: {err}"


def _run(spec, with_density, jobs):
    tasks = [(i, j, spec, with_density) for i in range(spec.nk) for j in range(spec.nmu)]
    if jobs and jobs > 1:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            results = pool.map(_solve_cell, tasks, chunksize=max(1, len(tasks) // (8 * jobs)))
    else:
        results = [_solve_cell(t) for t in tasks]
    cells = [[None] * spec.nmu for _ in range(spec.nk)]
    failures = []
    discontinuous = []
    for i, j, sol, flag, err in results:
        cells[i][j] = sol
        if err is not None:
            failures.append((i, j, err))
        if flag:
            discontinuous.append((i, j))
    grid = PhaseGrid(spec=spec, cells=cells, failures=failures,
                     rho_discontinuous=discontinuous)
    grid.boundaries = extract_lobe_boundary(grid)
    grid.lobe_tips = _label_lobes(grid)
    return grid


def run_phase_diagram(spec: GridSpec, jobs=1) -> PhaseGrid:
    """Minimize over psi at every grid cell; deterministic for any worker count."""
    return _run(spec, with_density=False, jobs=jobs)


def run_density_map(spec: GridSpec, jobs=1) -> PhaseGrid:
    """As run_phase_diagram, with rho recomputed per cell by the central-difference probe."""
    return _run(spec, with_density=True, jobs=jobs)


def _fill_failed(field_arr):
    """Replace NaNs by the mean of their finite 4-neighbors (failed cells only)."""
    out = field_arr.copy()
    bad = np.argwhere(~np.isfinite(out))
    for i, j in bad:
        vals = []
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < out.shape[0] and 0 <= b < out.shape[1] and np.isfinite(out[a, b]):
                vals.append(out[a, b])
        out[i, j] = np.mean(vals) if vals else 0.0
    return out


def _log_field(grid: PhaseGrid):
    psi = _fill_failed(grid.psi_field())
    return np.log10(psi + PSI_FLOOR)


def extract_lobe_boundary(grid: PhaseGrid):
    """Marching-squares contours of the order-parameter field at the phase threshold.

    The contour level is applied to log10(psi + floor), which stabilizes the
    crossing between Mott cells (psi ~ 0) and superfluid cells.  An exact
    kappa = 0 column is uniformly Mott by construction and would fuse every
    lobe into one curve, so it is excluded; each lobe then yields its own
    edge-terminated polyline once the grid resolves the gaps between lobes.
    Polylines are ordered by increasing mu at their low-kappa end.
    """
    if grid.spec.nk == 0 or grid.spec.nmu == 0 or not grid.cells:
        raise ValueError("empty grid")
    logpsi = _log_field(grid)
    level = math.log10(CONTOUR_LEVEL_PSI)
    k0 = 1 if grid.spec.kappa_min == 0.0 and grid.spec.nk > 2 else 0
    lines = _contours.marching_squares(
        logpsi[k0:], level, grid.spec.kappa_axis()[k0:], grid.spec.mu_rel_axis()
    )
    return sorted(lines, key=_kmin_mu)


def _kmin_mu(line):
    """mu coordinate where the polyline comes closest to the low-kappa edge."""
    i = int(np.argmin(line[:, 0]))
    return float(line[i, 1])


def sf_onset_curve(grid: PhaseGrid):
    """Superfluid onset hopping per mu column, interpolated on the log field.

    Returns an (nmu,) array: the kappa where psi first crosses the phase
    threshold going up each column, +inf for columns that stay Mott up to
    kappa_max, and 0.0 for columns already superfluid at the first kappa.
    """
    logpsi = _log_field(grid)
    level = math.log10(CONTOUR_LEVEL_PSI)
    kappas = grid.spec.kappa_axis()
    onset = np.full(grid.spec.nmu, np.inf)
    for j in range(grid.spec.nmu):
        col = logpsi[:, j]
        if col[0] > level:
            onset[j] = kappas[0]
            continue
        above = np.nonzero(col > level)[0]
        if above.size == 0:
            continue
        i = above[0]
        t = (level - col[i - 1]) / (col[i] - col[i - 1])
        onset[j] = kappas[i - 1] + t * (kappas[i] - kappas[i - 1])
    return onset


def boundary_intercepts(grid: PhaseGrid):
    """mu positions where the Mott/superfluid interface reaches kappa -> 0.

    Local minima of the onset curve locate the inter-lobe degeneracies; each
    is refined by the vertex of a parabola through the three nearest columns.
    """
    onset = sf_onset_curve(grid)
    mus = grid.spec.mu_rel_axis()
    ceiling = np.max(onset[np.isfinite(onset)], initial=0.0)
    finite = np.where(np.isfinite(onset), onset, ceiling)
    out = []
    for j in range(1, grid.spec.nmu - 1):
        if finite[j] <= finite[j - 1] and finite[j] < finite[j + 1]:
            a, b, c = finite[j - 1], finite[j], finite[j + 1]
            denom = a - 2 * b + c
            shift = 0.5 * (a - c) / denom if denom > 0 else 0.0
            shift = float(np.clip(shift, -1.0, 1.0))
            out.append((float(mus[j] + shift * (mus[j + 1] - mus[j])), float(b)))
    return out


def ground_manifold_at_zero_hopping(params: ModelParams, mu_rel, n_hi=None):
    """Ground fixed-excitation manifold at kappa = 0 for the given relative chemical potential."""
    x = params.omega
    mu = x + mu_rel
    if n_hi is None:
        n_hi = params.N + params.n_max
    energies = [_block_ground(n, x, mu, params.N) for n in range(n_hi + 1)]
    return int(np.argmin(energies))


def _label_lobes(grid: PhaseGrid):
    """Per-lobe tips from the onset curve, split at the inter-lobe minima."""
    onset = sf_onset_curve(grid)
    mus = grid.spec.mu_rel_axis()
    cuts = [m for m, _ in boundary_intercepts(grid)]
    edges = [mus[0] - 1e-12] + sorted(cuts) + [mus[-1] + 1e-12]
    tips = []
    for lo, hi in zip(edges, edges[1:]):
        inside = (mus > lo) & (mus <= hi) if lo != edges[0] else (mus >= lo) & (mus <= hi)
        if not np.any(inside):
            continue
        seg = onset[inside]
        clipped = bool(np.any(np.isinf(seg)))
        tip = float(grid.spec.kappa_max) if clipped else float(np.max(seg))
        if tip <= grid.spec.kappa_min:
            continue  # fully superfluid strip, not a lobe
        if clipped:
            mu_tip = float(0.5 * (max(lo, mus[0]) + min(hi, mus[-1])))
        else:
            mu_tip = float(mus[inside][int(np.argmax(seg))])
        try:
            n = ground_manifold_at_zero_hopping(grid.spec.params_base, mu_tip)
        except Exception:
            n = None
        tips.append(LobeTip(n=n, kappa_tip=tip,
                            mu_rel_interval=(float(max(lo, mus[0])), float(min(hi, mus[-1]))),
                            tip_at_window_edge=clipped))
    return tips


def zero_hopping_intervals(params: ModelParams, mu_rel_min, mu_rel_max, samples=400):
    """Ground-manifold intervals over a relative-chemical-potential window at kappa = 0.

    Returns a list of (manifold, mu_rel_lo, mu_rel_hi); interval edges interior
    to the window are refined by bisection on the block-degeneracy condition.
    """
    x = params.omega
    mus = np.linspace(mu_rel_min, mu_rel_max, samples)
    labels = [ground_manifold_at_zero_hopping(params, m) for m in mus]
    intervals = []
    start = mus[0]
    for k in range(1, samples):
        if labels[k] != labels[k - 1]:
            lo, hi = mus[k - 1], mus[k]
            na, nb = labels[k - 1], labels[k]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                ea = _block_ground(na, x, x + mid, params.N)
                eb = _block_ground(nb, x, x + mid, params.N)
                if ea <= eb:
                    lo = mid
                else:
                    hi = mid
            edge = 0.5 * (lo + hi)
            intervals.append((labels[k - 1], float(start), float(edge)))
            start = edge
    intervals.append((labels[-1], float(start), float(mus[-1])))
    return intervals


def first_lobe_window(params: ModelParams, min_width=1e-4):
    """Manifold and mu_rel interval of the first measurable Mott lobe above the vacuum.

    The vacuum loses at mu_rel = -1 exactly.  For larger atom numbers a
    cascade of ever-narrower lobes (down to widths ~1e-7) sits right below
    that edge, far below any practical sweep resolution; intervals narrower
    than min_width are skipped.  The edge region is rescanned finely so a
    thin-but-measurable lobe hidden between coarse samples is still found.
    """
    coarse = zero_hopping_intervals(params, -1.0 + 1e-9, -0.5, samples=2000)
    excited = [iv for iv in coarse if iv[0] > 0]
    if not excited:
        raise RuntimeError("no lobe found above the vacuum in the scanned window")
    # rescan up to the end of the first coarse-resolved lobe; anything before
    # it that the coarse pass skipped is caught by the fine pass below
    fine_hi = next((hi for _, lo, hi in excited if hi - lo >= min_width), excited[-1][2])
    samples = int(np.clip((fine_hi + 1.0) / (min_width / 4), 200, 20000))
    fine = zero_hopping_intervals(params, -1.0 + 1e-9, fine_hi, samples=samples)
    for n, lo, hi in fine:
        if n > 0 and (hi - lo) >= min_width:
            return n, lo, hi
    raise RuntimeError(
        f"no lobe wider than {min_width} above the vacuum (only sub-resolution slivers)"
    )


def lobe_tip_scaling(N_list, n_lobe, template: GridSpec, jobs=1, auto_window=True):
    """Tip hopping strength of one Mott lobe across atom numbers.

    For each N the template grid is re-targeted (when auto_window is set) to a
    window around the requested lobe, chosen from the zero-hopping intervals
    and a bisection estimate of the tip.  Lobes absent at some N are reported
    with kappa_tip None.

    n_lobe selects the ground manifold of the lobe; pass None for the first
    lobe above the vacuum, whatever its manifold.
    """
    out = []
    for N in N_list:
        base = replace(template.params_base, N=int(N))
        try:
            if n_lobe is None:
                n, lo, hi = first_lobe_window(base)
            else:
                n = int(n_lobe)
                intervals = zero_hopping_intervals(base, -1.05, -0.5, samples=2000)
                match = [iv for iv in intervals if iv[0] == n]
                if not match:
                    out.append((int(N), n, None))
                    continue
                _, lo, hi = match[0]
        except Exception:
            out.append((int(N), n_lobe, None))
            continue
        spec = template
        if auto_window:
            mu_mid = 0.5 * (lo + hi)
            tip_est = _tip_estimate(base, mu_mid)
            width = hi - lo
            spec = GridSpec(
                kappa_min=0.0,
                kappa_max=max(1.5 * tip_est, 1e-6),
                mu_rel_min=lo - 0.05 * width,
                mu_rel_max=hi + 0.05 * width,
                nk=template.nk,
                nmu=template.nmu,
                params_base=base,
            )
        else:
            spec = replace(template, params_base=base)
        grid = run_phase_diagram(spec, jobs=jobs)
        tips = [t for t in grid.lobe_tips if t.n == n]
        if tips:
            out.append((int(N), n, max(t.kappa_tip for t in tips)))
        else:
            out.append((int(N), n, None))
    return out


def _tip_estimate(params: ModelParams, mu_rel, kappa_hi=0.5):
    """Bisection estimate of the superfluid onset hopping at fixed chemical potential."""
    mu = params.omega + mu_rel

    def is_sf(kappa):
        sol = minimize_over_psi(replace(params, kappa=kappa, mu=mu))
        return sol.phase is Phase.Superfluid

    lo, hi = 0.0, kappa_hi
    if not is_sf(hi):
        return hi
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if is_sf(mid):
            hi = mid
        else:
            lo = mid
    return hi
