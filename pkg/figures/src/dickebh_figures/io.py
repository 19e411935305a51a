"""CSV readers for the dickebh wire formats, with strict header validation."""

import json
from pathlib import Path

import numpy as np

# exact headers written by the dickebh CLI, keyed by figure kind
EXPECTED_HEADERS = {
    "spectrum": ["n", "omega_over_beta", "e_minus", "e_zero", "e_plus"],
    "rabi": ["n", "omega_over_beta", "R"],
    "mu_crit": ["n", "omega_over_beta", "mu_c_eq10", "mu_c_degeneracy"],
    "convergence": ["n_max", "e_ground"],
    "phase_diagram": ["kappa_over_beta", "mu_rel", "psi_min", "e_ground", "rho",
                      "phase", "converged"],
    "density": ["kappa_over_beta", "mu_rel", "psi_min", "e_ground", "rho",
                "phase", "converged"],
}
EXPECTED_HEADERS["multi_N_panel"] = EXPECTED_HEADERS["phase_diagram"]


class SchemaError(ValueError):
    """CSV header does not match the figure kind."""


def read_table(path, kind):
    """Rows of the CSV as a dict of column -> list of strings, header-checked."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise SchemaError(f"{path}: file is empty, expected header {EXPECTED_HEADERS[kind]}")
    header = lines[0].split(",")
    expected = EXPECTED_HEADERS[kind]
    if header != expected:
        raise SchemaError(f"{path}: expected columns {expected}, found {header}")
    if len(lines) == 1:
        raise SchemaError(f"{path}: no data rows")
    columns = {name: [] for name in header}
    for ln in lines[1:]:
        for name, value in zip(header, ln.split(",")):
            columns[name].append(value)
    return columns


def column(table, name):
    return np.array([float(v) for v in table[name]])


def phase_grid(table):
    """Reshape flat phase rows (kappa-major, mu fastest) onto the rectangular grid."""
    kappa = column(table, "kappa_over_beta")
    mu = column(table, "mu_rel")
    kappas = np.unique(kappa)
    mus = np.unique(mu)
    fields = {}
    for name in ("psi_min", "e_ground", "rho"):
        fields[name] = column(table, name).reshape(len(kappas), len(mus))
    return kappas, mus, fields


def read_sidecar(csv_path):
    """The JSON sidecar written next to the CSV, or None when absent."""
    p = Path(csv_path).with_suffix(".json")
    if not p.exists():
        return None
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError:
        return None
