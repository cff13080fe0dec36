"""Exception hierarchy shared by all modules."""


class FrontrackError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(FrontrackError, ValueError):
    """Malformed numerical input (NaN, wrong shape, empty where forbidden)."""


class ConditionError(FrontrackError, ValueError):
    """A mathematical precondition of an inequality check is not met."""


class GuardError(FrontrackError, ValueError):
    """Input too large for an exponential-cost reference routine."""


class DomainError(FrontrackError, ValueError):
    """A state lies outside the admissible region of a model or chart."""


class RadiusError(DomainError):
    """A wave-curve parameter exceeds the configured Newton radius."""


class ConvergenceError(FrontrackError, RuntimeError):
    """An iterative solver failed to converge."""


class DegenerateJumpError(FrontrackError, ValueError):
    """Shock speed requested for a jump with a vanishing denominator."""


class PreconditionError(FrontrackError, ValueError):
    """Structural precondition violated (wrong families, order, etc.)."""


class ResourceError(FrontrackError, RuntimeError):
    """Event cap exceeded. The partial trace is attached as ``trace``."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class StructureError(FrontrackError, RuntimeError):
    """A periodic wave pattern drifted away from its expected structure."""


class ConfigError(FrontrackError, ValueError):
    """Invalid run configuration or trace schema."""
