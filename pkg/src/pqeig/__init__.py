"""First eigenpair of the coupled (p,q)-Laplacian Dirichlet system."""

from .errors import (
    AlignmentError,
    ConfigError,
    FieldError,
    OracleError,
    ParameterError,
    ProjectionError,
    ShapeError,
    SolverError,
)
from .mesh import Grid, ScalarField, field_from_fn, make_grid, random_field
from .functional import (
    Exponents,
    coupling,
    dirichlet_energy,
    energy_total,
    grad_coupling,
    grad_energy,
    kkt_residual,
)
from .solver import (
    EigenPair,
    SimplicityVerdict,
    SolverConfig,
    SolverReport,
    align,
    balance_project,
    multi_start,
    solve,
)
from .oracle import linear_first_eig, pi_p, plap1d_lambda1

__all__ = [
    "AlignmentError",
    "ConfigError",
    "EigenPair",
    "Exponents",
    "FieldError",
    "Grid",
    "OracleError",
    "ParameterError",
    "ProjectionError",
    "ScalarField",
    "ShapeError",
    "SimplicityVerdict",
    "SolverConfig",
    "SolverError",
    "SolverReport",
    "align",
    "balance_project",
    "coupling",
    "dirichlet_energy",
    "energy_total",
    "field_from_fn",
    "grad_coupling",
    "grad_energy",
    "kkt_residual",
    "linear_first_eig",
    "make_grid",
    "multi_start",
    "pi_p",
    "plap1d_lambda1",
    "random_field",
    "solve",
]
