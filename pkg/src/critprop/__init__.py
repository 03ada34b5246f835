"""Lower bounds for the proportion of critical zeros of the Riemann zeta
function, computed from a three-piece mollified second moment.

The engine evaluates the six constants that make up the moment aggregate,
turns the aggregate into the zero-proportion bound 1 - log(c)/R, checks the
structural identities behind the reduction, and optimizes the free
polynomial data.
"""

from .jet import Jet, JetShape
from .kappa import BoundReport, InvalidAggregateError, bound_from_terms, evaluate_bound
from .mollifier import (
    MODE_KAPPA,
    MODE_KAPPA_STAR,
    THETA_SUPREMA,
    ConfigError,
    GridSettings,
    MollifierConfig,
    PolynomialSpec,
    free_param_count,
    from_free_params,
    paper_kappa_config,
    paper_kappa_star_config,
    to_free_params,
)
from .optimizer import OptimizationResult, optimize
from .quadrature import GridSpec, NonFiniteIntegrandError, integrate_c12_region, integrate_cube
from .terms import TERM_NAMES, TermBreakdown, TermValue, eval_all, eval_term
from .verify import (
    ShiftVector,
    check_int_identity,
    check_operator_reduction_c31,
    check_partial_fraction,
)

__all__ = [
    "BoundReport",
    "ConfigError",
    "GridSettings",
    "GridSpec",
    "InvalidAggregateError",
    "Jet",
    "JetShape",
    "MODE_KAPPA",
    "MODE_KAPPA_STAR",
    "MollifierConfig",
    "NonFiniteIntegrandError",
    "OptimizationResult",
    "PolynomialSpec",
    "ShiftVector",
    "TERM_NAMES",
    "THETA_SUPREMA",
    "TermBreakdown",
    "TermValue",
    "bound_from_terms",
    "check_int_identity",
    "check_operator_reduction_c31",
    "check_partial_fraction",
    "eval_all",
    "eval_term",
    "evaluate_bound",
    "free_param_count",
    "from_free_params",
    "integrate_c12_region",
    "integrate_cube",
    "optimize",
    "paper_kappa_config",
    "paper_kappa_star_config",
    "to_free_params",
]

__version__ = "0.1.0"
