"""Exception hierarchy shared across the package."""


class FracHeatError(Exception):
    """Base class for all package-specific errors."""


class EvaluationError(FracHeatError):
    """A special-function evaluation could not be completed."""


class ConvergenceError(EvaluationError):
    """No evaluation route converged within the configured term budget."""


class UnreliableEvaluationError(EvaluationError):
    """Cancellation exceeded what the precision escalation can recover.

    Raised instead of returning a silently wrong number.
    """


class ContourError(EvaluationError):
    """The deformed integration contour passes too close to a pole."""


class QuadratureError(FracHeatError):
    """An improper integral failed to meet its target tolerance."""


class InsufficientDataError(FracHeatError):
    """A fit was requested on too few usable data points."""
