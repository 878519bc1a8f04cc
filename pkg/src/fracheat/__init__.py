"""fracheat: numerical laboratory for the time-fractional heat propagator.

Implements the propagator E_alpha(-t^alpha L) under its two
representations — direct Mittag-Leffler evaluation and Wright-function
subordination over the classical heat semigroup — and quantifies the
endpoint behavior of L^p -> L^q time-decay constants under each.
"""

from .errors import (
    ContourError,
    ConvergenceError,
    EvaluationError,
    FracHeatError,
    InsufficientDataError,
    QuadratureError,
    UnreliableEvaluationError,
)
from .special_functions import (
    Alpha,
    EvalPolicy,
    gamma_fn,
    mittag_leffler_contour,
    mittag_leffler_neg,
    reciprocal_gamma,
    uniform_bound_constant,
    wright_m,
)
from .subordination import (
    QuadratureSpec,
    dirac_limit_check,
    endpoint_divergence_profile,
    subordinate_scalar,
    subordination_constant,
    wright_moment,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "EvalPolicy",
    "QuadratureSpec",
    "gamma_fn",
    "reciprocal_gamma",
    "mittag_leffler_neg",
    "mittag_leffler_contour",
    "wright_m",
    "uniform_bound_constant",
    "subordinate_scalar",
    "wright_moment",
    "subordination_constant",
    "endpoint_divergence_profile",
    "dirac_limit_check",
    "FracHeatError",
    "EvaluationError",
    "ConvergenceError",
    "UnreliableEvaluationError",
    "ContourError",
    "QuadratureError",
    "InsufficientDataError",
    "__version__",
]
