"""Mean-field Mott-insulator/superfluid transitions of light in coupled cavities,
each holding N two-level atoms collectively coupled to one photon mode."""

__version__ = "0.1.0"

from .hamiltonian import (
    ModelParams,
    BasisState,
    SymmetricMatrix,
    jpjm_eigenvalue,
    build_dicke_block,
    build_mean_field_matrix,
)
from .eig import EigenPair, SolverError, ground_state, full_spectrum
from .dressed import (
    DressedTriple,
    BoundaryNotFoundError,
    rabi,
    dressed_triple,
    critical_mu_formula,
    lobe_boundary_zero_hopping,
)
from .meanfield import (
    Phase,
    MeanFieldSolution,
    ground_energy_at_psi,
    minimize_over_psi,
    mean_excitations,
    convergence_study,
)
from .sweep import (
    GridSpec,
    PhaseGrid,
    run_phase_diagram,
    run_density_map,
    extract_lobe_boundary,
    lobe_tip_scaling,
)

__all__ = [
    "ModelParams", "BasisState", "SymmetricMatrix", "jpjm_eigenvalue",
    "build_dicke_block", "build_mean_field_matrix",
    "EigenPair", "SolverError", "ground_state", "full_spectrum",
    "DressedTriple", "BoundaryNotFoundError", "rabi", "dressed_triple",
    "critical_mu_formula", "lobe_boundary_zero_hopping",
    "Phase", "MeanFieldSolution", "ground_energy_at_psi", "minimize_over_psi",
    "mean_excitations", "convergence_study",
    "GridSpec", "PhaseGrid", "run_phase_diagram", "run_density_map",
    "extract_lobe_boundary", "lobe_tip_scaling",
]
