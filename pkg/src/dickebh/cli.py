"""Command-line entry point: wires flags to computations and writes CSV/JSON outputs.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.
Every CSV gets a JSON sidecar with the fully resolved configuration.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .hamiltonian import ModelParams
from .meanfield import (
    minimize_over_psi,
    convergence_study,
    first_converged,
)
from .dressed import (
    rabi,
    dressed_triple,
    critical_mu_formula,
    lobe_boundary_zero_hopping,
    BoundaryNotFoundError,
)
from .eig import SolverError
from . import sweep as sweep_mod

SCHEMAS = {
    "spectrum": ["n", "omega_over_beta", "e_minus", "e_zero", "e_plus"],
    "rabi": ["n", "omega_over_beta", "R"],
    "mu-crit": ["n", "omega_over_beta", "mu_c_eq10", "mu_c_degeneracy"],
    "phase": ["kappa_over_beta", "mu_rel", "psi_min", "e_ground", "rho", "phase", "converged"],
    "converge": ["n_max", "e_ground"],
    "lobe-tips": ["atoms", "lobe_manifold", "kappa_tip", "found"],
}

# flag rendering order per subcommand, used for the round-trip and the sidecar
DESTS = {
    "spectrum": ["atoms", "omega", "omega_points", "n_max", "output", "format"],
    "rabi": ["atoms", "omega", "omega_points", "n_max", "output", "format"],
    "mu-crit": ["atoms", "omega", "omega_max", "omega_points", "n_min", "n_max",
                "output", "format"],
    "converge": ["atoms", "omega", "epsilon", "kappa", "mu_rel", "z",
                 "cutoff_min", "cutoff_max", "output", "format"],
    "solve": ["atoms", "omega", "epsilon", "kappa", "mu_rel", "z", "n_max",
              "output", "format"],
    "phase-diagram": ["atoms", "omega", "epsilon", "z", "n_max", "kappa_min", "kappa_max",
                      "mu_rel_min", "mu_rel_max", "nk", "nmu", "jobs", "output", "format"],
    "density": ["atoms", "omega", "epsilon", "z", "n_max", "kappa_min", "kappa_max",
                "mu_rel_min", "mu_rel_max", "nk", "nmu", "jobs", "output", "format"],
    "lobe-tips": ["atoms_list", "lobe", "omega", "n_max", "nk", "nmu", "jobs",
                  "output", "format"],
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    values: tuple  # ((dest, value), ...) in DESTS order, fully resolved

    def get(self, dest):
        return dict(self.values)[dest]

    def to_argv(self):
        argv = [self.subcommand]
        for dest, value in self.values:
            if value is None:
                continue
            argv += [f"--{dest.replace('_', '-')}", str(value)]
        return argv


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _nonneg_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _default_jobs():
    try:
        return max(1, int(os.environ.get("DICKEBH_JOBS", "1")))
    except ValueError:
        return 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dickebh",
        description="Mean-field phase transitions of light for N two-level atoms per cavity",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("-o", "--output", required=True, help="output file path")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("spectrum", help="dressed branch energies vs omega/beta")
    p.add_argument("--atoms", type=_positive_int, default=2)
    p.add_argument("--omega", type=_nonneg_float, required=True, help="omega/beta axis maximum")
    p.add_argument("--omega-points", type=_positive_int, default=201)
    p.add_argument("--n-max", type=_positive_int, default=3, help="highest excitation manifold")
    add_common(p)

    p = sub.add_parser("rabi", help="effective Rabi splitting vs omega/beta")
    p.add_argument("--atoms", type=_positive_int, default=2)
    p.add_argument("--omega", type=_nonneg_float, required=True)
    p.add_argument("--omega-points", type=_positive_int, default=201)
    p.add_argument("--n-max", type=_positive_int, default=6)
    add_common(p)

    p = sub.add_parser("mu-crit", help="critical chemical potential, closed form and degeneracy solver")
    p.add_argument("--atoms", type=_positive_int, default=2)
    p.add_argument("--omega", type=_nonneg_float, required=True)
    p.add_argument("--omega-max", type=_nonneg_float, default=None,
                   help="sweep omega/beta up to this value")
    p.add_argument("--omega-points", type=_positive_int, default=19)
    p.add_argument("--n-min", type=_positive_int, default=2)
    p.add_argument("--n-max", type=_positive_int, default=10)
    add_common(p)

    p = sub.add_parser("converge", help="ground energy vs photon cutoff")
    p.add_argument("--atoms", type=_positive_int, default=2)
    p.add_argument("--omega", type=_nonneg_float, default=10.0)
    p.add_argument("--epsilon", type=float, default=None, help="defaults to omega (resonance)")
    p.add_argument("--kappa", type=_nonneg_float, default=0.05)
    p.add_argument("--mu-rel", type=float, default=-0.85)
    p.add_argument("--z", type=_positive_int, default=1)
    p.add_argument("--cutoff-min", type=_positive_int, default=2)
    p.add_argument("--cutoff-max", type=_positive_int, default=30)
    add_common(p)

    p = sub.add_parser("solve", help="mean-field solution at one parameter point")
    p.add_argument("--atoms", type=_positive_int, default=2)
    p.add_argument("--omega", type=_nonneg_float, default=10.0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--kappa", type=_nonneg_float, required=True)
    p.add_argument("--mu-rel", type=float, required=True)
    p.add_argument("--z", type=_positive_int, default=1)
    p.add_argument("--n-max", type=_positive_int, default=30)
    add_common(p)

    for name in ("phase-diagram", "density"):
        p = sub.add_parser(name, help=f"{name} sweep over (kappa, mu_rel)")
        p.add_argument("--atoms", type=_positive_int, default=2)
        p.add_argument("--omega", type=_nonneg_float, default=10.0)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--z", type=_positive_int, default=1)
        p.add_argument("--n-max", type=_positive_int, default=30)
        p.add_argument("--kappa-min", type=_nonneg_float, default=0.0)
        p.add_argument("--kappa-max", type=_nonneg_float, required=True)
        p.add_argument("--mu-rel-min", type=float, required=True)
        p.add_argument("--mu-rel-max", type=float, required=True)
        p.add_argument("--nk", type=_positive_int, default=200)
        p.add_argument("--nmu", type=_positive_int, default=200)
        p.add_argument("--jobs", type=_positive_int, default=_default_jobs())
        add_common(p)

    p = sub.add_parser("lobe-tips", help="Mott-lobe tip hopping across atom numbers")
    p.add_argument("--atoms-list", default="3,4,5,6,7,10",
                   help="comma-separated atom numbers")
    p.add_argument("--lobe", default="first",
                   help="lobe manifold number, or 'first' for the first lobe above the vacuum")
    p.add_argument("--omega", type=_nonneg_float, default=10.0)
    p.add_argument("--n-max", type=_positive_int, default=30)
    p.add_argument("--nk", type=_positive_int, default=32)
    p.add_argument("--nmu", type=_positive_int, default=24)
    p.add_argument("--jobs", type=_positive_int, default=_default_jobs())
    add_common(p)

    return parser


def parse_args(argv) -> RunConfig:
    """Parse and validate flags; raises SystemExit(2) on usage errors."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    cmd = ns.subcommand
    if cmd in ("spectrum", "rabi", "mu-crit") and ns.atoms != 2:
        parser.error(f"--atoms: closed forms are two-atom resonance results, got {ns.atoms}")
    if cmd == "mu-crit" and ns.n_min < 2:
        parser.error("--n-min: closed form needs n >= 2")
    if cmd in ("converge",) and ns.cutoff_min >= ns.cutoff_max:
        parser.error("--cutoff-min must be below --cutoff-max")
    if cmd == "lobe-tips":
        try:
            atoms = [int(a) for a in ns.atoms_list.split(",") if a.strip()]
            if not atoms or any(a < 1 for a in atoms):
                raise ValueError
        except ValueError:
            parser.error(f"--atoms-list: expected comma-separated positive integers, got {ns.atoms_list!r}")
        if ns.lobe != "first":
            try:
                int(ns.lobe)
            except ValueError:
                parser.error(f"--lobe: expected an integer or 'first', got {ns.lobe!r}")
    values = tuple((dest, getattr(ns, dest)) for dest in DESTS[cmd])
    return RunConfig(subcommand=cmd, values=values)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{value:.17g}"
    if value is None:
        return "nan"
    return str(value)


def write_rows(path, header, rows, fmt):
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        records = [dict(zip(header, row)) for row in rows]
        path.write_text(json.dumps(records, indent=1, default=_fmt) + "\n")


def sidecar_path(output_path):
    p = Path(output_path)
    if p.suffix == ".json":
        return p.with_suffix(".meta.json")
    return p.with_suffix(".json")


def write_sidecar(output_path, config: RunConfig, extra=None):
    payload = {
        "tool": "dickebh",
        "version": __version__,
        "subcommand": config.subcommand,
        "params": dict(config.values),
        "command": config.to_argv(),
    }
    if extra:
        payload.update(extra)
    sidecar_path(output_path).write_text(json.dumps(payload, indent=1, default=str) + "\n")


def _omega_axis(cfg):
    return np.linspace(0.0, cfg.get("omega"), cfg.get("omega_points"))


def _run_spectrum(cfg):
    rows = []
    for n in range(0, cfg.get("n_max") + 1):
        for x in _omega_axis(cfg):
            t = dressed_triple(n, float(x))
            rows.append((n, float(x),
                         math.nan if t.e_minus is None else t.e_minus,
                         math.nan if t.e_zero is None else t.e_zero,
                         math.nan if t.e_plus is None else t.e_plus))
    return SCHEMAS["spectrum"], rows, {}


def _run_rabi(cfg):
    rows = []
    for n in range(1, cfg.get("n_max") + 1):
        for x in _omega_axis(cfg):
            rows.append((n, float(x), rabi(n, float(x))))
    return SCHEMAS["rabi"], rows, {}


def _run_mu_crit(cfg):
    if cfg.get("omega_max") is not None:
        xs = np.linspace(cfg.get("omega"), cfg.get("omega_max"), cfg.get("omega_points"))
    else:
        xs = np.array([cfg.get("omega")])
    rows = []
    for n in range(cfg.get("n_min"), cfg.get("n_max") + 1):
        for x in xs:
            x = float(x)
            closed = critical_mu_formula(n, x)
            try:
                degeneracy = lobe_boundary_zero_hopping(n, x)
            except (BoundaryNotFoundError, ValueError):
                degeneracy = math.nan
            rows.append((n, x, closed, degeneracy))
    return SCHEMAS["mu-crit"], rows, {}


def _model_params(cfg, **overrides):
    kwargs = dict(
        N=cfg.get("atoms"),
        omega=cfg.get("omega"),
        epsilon=cfg.get("epsilon") if "epsilon" in dict(cfg.values) else None,
        z=cfg.get("z") if "z" in dict(cfg.values) else 1,
        n_max=cfg.get("n_max") if "n_max" in dict(cfg.values) else 30,
    )
    kwargs.update(overrides)
    return ModelParams(**kwargs)


def _run_converge(cfg):
    params = _model_params(
        cfg,
        kappa=cfg.get("kappa"),
        mu=cfg.get("omega") + cfg.get("mu_rel"),
        n_max=cfg.get("cutoff_max"),
    )
    points = convergence_study(params, range(cfg.get("cutoff_min"), cfg.get("cutoff_max") + 1))
    return SCHEMAS["converge"], points, {"converged_at": first_converged(points)}


def _phase_row(kappa, mu_rel, sol):
    if sol is None:
        return (kappa, mu_rel, math.nan, math.nan, math.nan, "NA", False)
    return (kappa, mu_rel, sol.psi_min, sol.e_ground, sol.rho,
            sol.phase.value, sol.converged)


def _run_solve(cfg):
    params = _model_params(cfg, kappa=cfg.get("kappa"),
                           mu=cfg.get("omega") + cfg.get("mu_rel"))
    sol = minimize_over_psi(params)
    row = _phase_row(cfg.get("kappa"), cfg.get("mu_rel"), sol)
    return SCHEMAS["phase"], [row], {"converged": sol.converged}


def _grid_spec(cfg):
    return sweep_mod.GridSpec(
        kappa_min=cfg.get("kappa_min"),
        kappa_max=cfg.get("kappa_max"),
        mu_rel_min=cfg.get("mu_rel_min"),
        mu_rel_max=cfg.get("mu_rel_max"),
        nk=cfg.get("nk"),
        nmu=cfg.get("nmu"),
        params_base=_model_params(cfg),
    )


def _sweep_extra(grid):
    spec = grid.spec
    intervals = sweep_mod.zero_hopping_intervals(
        spec.params_base, spec.mu_rel_min, spec.mu_rel_max, samples=600
    )
    boundaries = [
        {"n_below": a[0], "n_above": b[0], "mu_rel": a[2]}
        for a, b in zip(intervals, intervals[1:])
    ]
    return {
        "grid": {
            "kappa_min": spec.kappa_min, "kappa_max": spec.kappa_max,
            "mu_rel_min": spec.mu_rel_min, "mu_rel_max": spec.mu_rel_max,
            "nk": spec.nk, "nmu": spec.nmu,
        },
        "zero_hopping_boundaries": boundaries,
        "lobes": [
            {"n": t.n, "kappa_tip": t.kappa_tip, "mu_rel_interval": list(t.mu_rel_interval),
             "clipped": t.tip_at_window_edge}
            for t in grid.lobe_tips
        ],
        "failures": grid.failures,
    }


def _run_sweep(cfg, with_density):
    spec = _grid_spec(cfg)
    runner = sweep_mod.run_density_map if with_density else sweep_mod.run_phase_diagram
    grid = runner(spec, jobs=cfg.get("jobs"))
    kappas = spec.kappa_axis()
    mu_rels = spec.mu_rel_axis()
    rows = [
        _phase_row(float(kappas[i]), float(mu_rels[j]), grid.cells[i][j])
        for i in range(spec.nk) for j in range(spec.nmu)
    ]
    return SCHEMAS["phase"], rows, _sweep_extra(grid)


def _run_lobe_tips(cfg):
    atoms = [int(a) for a in cfg.get("atoms_list").split(",") if a.strip()]
    lobe = cfg.get("lobe")
    n_lobe = None if lobe == "first" else int(lobe)
    template = sweep_mod.GridSpec(
        kappa_min=0.0, kappa_max=0.1, mu_rel_min=-1.05, mu_rel_max=-0.5,
        nk=cfg.get("nk"), nmu=cfg.get("nmu"),
        params_base=ModelParams(N=atoms[0], omega=cfg.get("omega"), n_max=cfg.get("n_max")),
    )
    series = sweep_mod.lobe_tip_scaling(atoms, n_lobe, template, jobs=cfg.get("jobs"))
    rows = [
        (N, n if n is not None else math.nan,
         tip if tip is not None else math.nan, tip is not None)
        for N, n, tip in series
    ]
    return SCHEMAS["lobe-tips"], rows, {}


_RUNNERS = {
    "spectrum": _run_spectrum,
    "rabi": _run_rabi,
    "mu-crit": _run_mu_crit,
    "converge": _run_converge,
    "solve": _run_solve,
    "phase-diagram": lambda cfg: _run_sweep(cfg, with_density=False),
    "density": lambda cfg: _run_sweep(cfg, with_density=True),
    "lobe-tips": _run_lobe_tips,
}


def execute(config: RunConfig) -> int:
    """Run the configured computation and write output files."""
    started = time.perf_counter()
    try:
        header, rows, extra = _RUNNERS[config.subcommand](config)
    except (SolverError, BoundaryNotFoundError, FloatingPointError) as err:
        print(f"dickebh {config.subcommand}: numeric failure: {err}", file=sys.stderr)
        return 3
    try:
        write_rows(config.get("output"), header, rows, config.get("format"))
        write_sidecar(config.get("output"), config, extra)
    except OSError as err:
        print(f"dickebh {config.subcommand}: cannot write output: {err}", file=sys.stderr)
        return 4
    elapsed = time.perf_counter() - started
    lobes = len(extra.get("lobes", [])) if isinstance(extra, dict) else 0
    print(
        f"dickebh {config.subcommand}: {len(rows)} rows"
        + (f", {lobes} lobes" if "lobes" in (extra or {}) else "")
        + f", {elapsed:.1f} s -> {config.get('output')}",
        file=sys.stderr,
    )
    return 0


def main(argv=None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as err:
        return int(err.code or 0)
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
