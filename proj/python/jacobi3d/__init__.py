"""Solution families of the 3D Jacobi identities from a known Poisson structure."""

from ._core import (
    Diffeomorphism,
    Domain,
    DocumentError,
    EvalError,
    Expr,
    ParseError,
    PreconditionError,
    SamplingConfig,
    SolutionFamily,
    StructureMatrix,
    Trajectory,
    VerificationReport,
    bracket,
    case1_family,
    case3_family,
    catalog_get,
    catalog_list,
    characteristic_field,
    check_jacobi,
    check_pde,
    classify_case,
    hamiltonian_vector_field,
    integrate_characteristics,
    is_casimir,
    jacobi_residual,
    lambda_of,
    lv_exponents,
    parse,
    pushforward,
    rank_at,
)

__version__ = "0.1.0"

__all__ = [
    "Diffeomorphism",
    "Domain",
    "DocumentError",
    "EvalError",
    "Expr",
    "ParseError",
    "PreconditionError",
    "SamplingConfig",
    "SolutionFamily",
    "StructureMatrix",
    "Trajectory",
    "VerificationReport",
    "bracket",
    "case1_family",
    "case3_family",
    "catalog_get",
    "catalog_list",
    "characteristic_field",
    "check_jacobi",
    "check_pde",
    "classify_case",
    "hamiltonian_vector_field",
    "integrate_characteristics",
    "is_casimir",
    "jacobi_residual",
    "lambda_of",
    "lv_exponents",
    "parse",
    "pushforward",
    "rank_at",
]
