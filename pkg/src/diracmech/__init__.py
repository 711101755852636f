"""Symbolic and numeric workbench for degenerate Lagrangian systems.

Exact rational-expression algebra over a shared symbol table, Legendre
analysis of velocity-degenerate Lagrangians (constant and nonconstant
rank), Dirac brackets and first-class modification, stratified tangency
tests, orbit reduction, RK4 flows with conservation monitors, and a
reachability construction for the zero-Lagrangian set.
"""

from .dirac import (
    DiracData,
    DiracError,
    classify,
    constraint_matrix,
    dirac_bracket,
    dirac_data,
    first_class_tangency,
    modify_first_class,
    orbit_report,
)
from .dynamics import (
    euler_lagrange_residuals,
    hamiltonian_flow_exprs,
    integrate_field,
    lagrangian_flow_exprs,
    noether,
    reach_connect,
    reduction_chart_verify,
)
from .legendre import (
    ConstraintSystem,
    ModelSpec,
    energy,
    lagrange_two_form,
    legendre_map,
    primary_constraints,
    pushforward_hamiltonian,
    rank_strata,
    velocity_hessian,
)
from .modelfile import ModelError, load_model, model_from_dict
from .phase import PhaseSpace, VectorField, hamiltonian_vector_field, poisson_bracket
from .report import run_analysis
from .strata import StratifiedSet, Stratum
from .symexpr import RationalExpr, SymbolTable, parse_expr

__version__ = "1.0.0"

__all__ = [
    "ConstraintSystem",
    "DiracData",
    "DiracError",
    "ModelError",
    "ModelSpec",
    "PhaseSpace",
    "RationalExpr",
    "StratifiedSet",
    "Stratum",
    "SymbolTable",
    "VectorField",
    "classify",
    "constraint_matrix",
    "dirac_bracket",
    "dirac_data",
    "energy",
    "euler_lagrange_residuals",
    "first_class_tangency",
    "hamiltonian_flow_exprs",
    "hamiltonian_vector_field",
    "integrate_field",
    "lagrange_two_form",
    "lagrangian_flow_exprs",
    "legendre_map",
    "load_model",
    "model_from_dict",
    "modify_first_class",
    "noether",
    "orbit_report",
    "parse_expr",
    "poisson_bracket",
    "primary_constraints",
    "pushforward_hamiltonian",
    "rank_strata",
    "reach_connect",
    "reduction_chart_verify",
    "run_analysis",
    "velocity_hessian",
]
