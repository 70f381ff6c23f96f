"""Exception types shared across the package."""


class BHLError(Exception):
    """Base class for all package errors."""


class DomainError(BHLError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ConfigError(BHLError, ValueError):
    """Malformed configuration, grammar string, or input file."""


class ConvergenceError(BHLError, RuntimeError):
    """A series or iterative procedure failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class ResourceLimitError(BHLError, RuntimeError):
    """A configured size or count cap was exceeded."""


class NumericalError(BHLError, RuntimeError):
    """Numerically inconsistent state (non-finite values, PSD violation, ...)."""
