"""Custom exceptions for crsec."""

from typing import Optional


class CrsecError(Exception):
    """Base exception class for crsec errors."""
    pass


class ConfigError(CrsecError):
    """Configuration-related errors."""
    pass


class ValidationError(CrsecError):
    """Data validation errors."""
    pass


class InvalidDimensionError(ValidationError):
    """Vector lengths or antenna counts do not agree."""
    pass


class DomainError(ValidationError):
    """Value outside the domain of a formula (variances, powers, theta, rho)."""
    pass


class StorageError(CrsecError):
    """Storage and file system errors."""
    pass


class ChannelFileError(StorageError):
    """Malformed channel file."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class SolverError(CrsecError):
    """Interior-point solver errors."""
    pass


class CenteringStepError(SolverError):
    """Newton centering did not converge."""

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class LineSearchError(SolverError):
    """Backtracking collapsed below the minimum step."""
    pass


class PhaseOneError(SolverError):
    """No strictly feasible point was found."""
    pass


class CaseInfeasibleError(CrsecError):
    """A case sign pattern could not be reached for this channel."""
    pass
