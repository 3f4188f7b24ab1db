"""Algebraic Bethe ansatz for the open XXZ chain with triangular boundaries.

Dense-matrix constructions of the R-matrix, monodromy, K-matrices and the
double-row algebra, closed-form eigenvalues and Bethe equations, a Newton
solver for the roots, Bethe-vector builders, and a harness that checks
all of it against exact diagonalization.
"""

from .bethe import (
    RootSet,
    bethe_residual_d,
    bethe_residual_g,
    bethe_residual_total,
    bethe_residuals,
    canonicalize,
    lambda_d,
    lambda_g,
    lambda_total,
    zd_partition,
)
from .boundary import (
    LeftBoundary,
    ModelParams,
    RightBoundary,
    build_double_row,
    build_hamiltonian_direct,
    build_hamiltonian_from_transfer,
    build_k_minus,
    build_k_plus,
    build_modified_ops_lower,
    build_modified_ops_upper,
    build_transfer,
    hamiltonian_for,
)
from .functions import ScalarFunctions
from .harness import CheckReport, ConfigError, RunConfig, emit_report, run_solve, run_suite, run_suites, suite_ids
from .solver import SolveResult, solve_bethe, solve_sectors
from .states import (
    BetheVector,
    build_bethe_vector,
    build_phi_d,
    build_phi_lo_up,
    build_phi_up,
    covacuum,
    vacuum,
)
from .tensor import embed_local, kron, operator_tol, spectrum, total_spin_z
from .vertex import BulkParams, PoleError, build_monodromy, build_r, fn_b, izergin_z

__version__ = "0.1.0"

__all__ = [
    "BetheVector",
    "BulkParams",
    "CheckReport",
    "ConfigError",
    "LeftBoundary",
    "ModelParams",
    "PoleError",
    "RightBoundary",
    "RootSet",
    "RunConfig",
    "ScalarFunctions",
    "SolveResult",
    "bethe_residual_d",
    "bethe_residual_g",
    "bethe_residual_total",
    "bethe_residuals",
    "build_bethe_vector",
    "build_double_row",
    "build_hamiltonian_direct",
    "build_hamiltonian_from_transfer",
    "build_k_minus",
    "build_k_plus",
    "build_modified_ops_lower",
    "build_modified_ops_upper",
    "build_monodromy",
    "build_phi_d",
    "build_phi_lo_up",
    "build_phi_up",
    "build_r",
    "build_transfer",
    "canonicalize",
    "covacuum",
    "embed_local",
    "emit_report",
    "fn_b",
    "hamiltonian_for",
    "izergin_z",
    "kron",
    "lambda_d",
    "lambda_g",
    "lambda_total",
    "operator_tol",
    "run_solve",
    "run_suite",
    "run_suites",
    "solve_bethe",
    "solve_sectors",
    "spectrum",
    "suite_ids",
    "total_spin_z",
    "vacuum",
    "zd_partition",
]
