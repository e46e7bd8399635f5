"""Exception hierarchy shared by the library and the CLI."""


class SIVError(Exception):
    """Base class for all sivkit errors."""

    exit_code = 1


class DomainError(SIVError, ValueError):
    """An argument lies outside the domain where the model is defined."""

    exit_code = 2


class UnsupportedModelError(DomainError):
    """The requested closed form does not exist for this model (e.g. k != 0)."""


class IllConditionedFitError(DomainError):
    """Too few samples, or too short an arc, to determine a conic."""


class ToleranceError(SIVError, RuntimeError):
    """The adaptive integrator could not meet the requested tolerance."""

    exit_code = 3


class CollisionError(SIVError, RuntimeError):
    """The two bodies came closer than the configured collision radius."""

    exit_code = 4

    def __init__(self, message: str, tau: float | None = None):
        super().__init__(message)
        self.tau = tau
