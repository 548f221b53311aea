"""Exception types raised by the solver."""


class PPIFEError(Exception):
    """Base class for all solver errors."""


class GeometryViolation(PPIFEError):
    """The interface cuts an element in an unsupported configuration."""

    def __init__(self, message, element=None, time=None):
        super().__init__(message)
        self.element = element
        self.time = time


class NonConvergence(PPIFEError):
    """Root finding on an edge did not converge."""


class SingularLocalSystem(PPIFEError):
    """The local IFE constraint system is numerically singular."""


class OutsideElement(PPIFEError):
    """A point passed to a local evaluation lies outside the element."""


class SolverError(PPIFEError):
    """Base class for linear solver failures."""


class NotPositiveDefinite(SolverError):
    """Negative or zero curvature found during conjugate gradients."""


class MaxIterations(SolverError):
    """Iteration cap reached before the residual tolerance was met."""
