"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A parameter lies outside its family's domain (e.g. a non-positive scale)."""


class NotAvailableError(NotImplementedError):
    """A closed form or sampler is not available for the requested family/weight."""


class EstimationError(RuntimeError):
    """Base class for statistical-degeneracy failures (CLI exit code 1)."""


class InsufficientDataError(EstimationError):
    """Too few effective observations to estimate the requested parameters."""


class NonConvergenceError(EstimationError):
    """Every optimizer start diverged. Carries the best point seen, if any."""

    def __init__(self, message, best_theta=None, best_objective=None):
        super().__init__(message)
        self.best_theta = best_theta
        self.best_objective = best_objective


class DegenerateVarianceError(EstimationError):
    """Zero variance of the per-observation log-ratios with a nonzero total ratio."""


class DegenerateMixtureError(EstimationError):
    """Every mixture weight yields zero density at some observation."""


class QuadratureError(RuntimeError):
    """Numerical integration failed to produce a finite result."""
