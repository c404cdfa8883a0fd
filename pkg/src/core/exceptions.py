"""
Custom exceptions for the conditioning laboratory.
Provides structured error handling with specific exception types.
"""


class CondLabError(Exception):
    """Base exception for the conditioning laboratory"""

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        self.message = message
        self.error_code = error_code or "UNKNOWN_ERROR"
        self.details = details or {}
        super().__init__(message)

    def to_dict(self) -> dict:
        """Convert exception to dictionary"""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "error_code": self.error_code,
            "details": self.details
        }


class UsageError(CondLabError):
    """Exception raised for invalid arguments, shapes or lengths"""
    pass


class ResourceError(CondLabError):
    """Exception raised when a dense realization exceeds its size guard"""
    pass


class SingularityError(CondLabError):
    """Exception raised when a matrix is numerically singular"""
    pass


class DegeneratePivotError(CondLabError):
    """Exception raised when a Gohberg-Semencul scalar pivot is negligible"""
    pass


class DegenerateMinorError(CondLabError):
    """Exception raised when a leading principal minor vanishes"""
    pass


class ConvergenceError(CondLabError):
    """Exception raised when an iteration exceeds its hard cap"""
    pass


class DomainError(CondLabError):
    """Exception raised when a bound is evaluated outside its stated domain"""
    pass


class NumericalInstabilityError(CondLabError):
    """Exception raised when a compressed inverse fails its validation probe"""
    pass


class ConfigurationError(CondLabError):
    """Exception raised for configuration-related errors"""
    pass


class EmitError(CondLabError):
    """Exception raised when results cannot be written or read back"""
    pass


# Failures that the experiment driver answers by drawing a fresh matrix
TRIAL_FAILURES = (
    SingularityError,
    DegeneratePivotError,
    DegenerateMinorError,
    NumericalInstabilityError,
)
