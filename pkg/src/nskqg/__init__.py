"""Pseudospectral study of rotating compressible flow with capillarity on the
2D torus and its joint incompressible / vanishing-capillarity limit to the
viscous quasi-geostrophic equation.

The package provides two solvers sharing one spectral workspace: the scaled
compressible system with rotation, pressure, Korteweg stress, and density
dependent viscosity, and the limiting quasi-geostrophic equation.  The
diagnostics module tracks the physical energies, a modulated (relative)
energy measuring the distance between the two, and the norms whose decay in
eps quantifies the limit.  Experiments (single runs and eps sweeps) are
driven from YAML configs through the `nskqg` CLI.
"""

from .config import DEFAULTS, ExperimentConfig, load_config, parse_config
from .constitutive import (
    Params,
    g_eps,
    internal_energy,
    mu,
    pressure,
    sigma,
    sigma_mu_S,
    validate_params,
)
from .diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRow,
    WellPrep,
    cross_dissipation,
    diagnostics_row,
    energy_nsk,
    energy_qg,
    fit_rate,
    identity_residual,
    modulated_energy,
    momentum_norm_chain,
    wellprep_check,
)
from .errors import (
    BlowUpError,
    ConfigError,
    DomainError,
    ParameterError,
    SweepError,
    VacuumError,
)
from .experiments import (
    RunResult,
    SweepResult,
    generate_initial,
    run_experiment,
    run_limit_experiment,
    run_sweep,
)
from .io import read_diagnostics_csv, read_snapshot, write_diagnostics_csv, write_snapshot
from .nsk import (
    NskState,
    TimeControls,
    korteweg_divergence,
    linearized_mode_matrix,
    nsk_rhs,
    nsk_run,
    nsk_step,
    viscous_divergence,
)
from .qg import QgState, helmholtz_solve, phi_to_u, qg_residual, qg_rhs, qg_run, qg_step
from .spectral import (
    ScalarField,
    SpectralWorkspace,
    SymTensorField,
    VectorField,
    differentiate,
    div,
    div_perp,
    div_tensor,
    grad,
    laplacian,
    lp_norm,
    perp_grad,
    sym_gradient,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "CSV_COLUMNS",
    "ConfigError",
    "DEFAULTS",
    "DiagnosticsRow",
    "DomainError",
    "ExperimentConfig",
    "NskState",
    "Params",
    "ParameterError",
    "QgState",
    "RunResult",
    "ScalarField",
    "SpectralWorkspace",
    "SweepError",
    "SweepResult",
    "SymTensorField",
    "TimeControls",
    "VacuumError",
    "VectorField",
    "WellPrep",
    "cross_dissipation",
    "diagnostics_row",
    "differentiate",
    "div",
    "div_perp",
    "div_tensor",
    "energy_nsk",
    "energy_qg",
    "fit_rate",
    "g_eps",
    "generate_initial",
    "grad",
    "helmholtz_solve",
    "identity_residual",
    "internal_energy",
    "korteweg_divergence",
    "laplacian",
    "linearized_mode_matrix",
    "load_config",
    "lp_norm",
    "modulated_energy",
    "momentum_norm_chain",
    "mu",
    "nsk_rhs",
    "nsk_run",
    "nsk_step",
    "parse_config",
    "perp_grad",
    "phi_to_u",
    "pressure",
    "qg_residual",
    "qg_rhs",
    "qg_run",
    "qg_step",
    "read_diagnostics_csv",
    "read_snapshot",
    "run_experiment",
    "run_limit_experiment",
    "run_sweep",
    "sigma",
    "sigma_mu_S",
    "sym_gradient",
    "validate_params",
    "viscous_divergence",
    "wellprep_check",
    "write_diagnostics_csv",
    "write_snapshot",
]
