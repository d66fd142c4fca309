"""
Custom exception types for the mcfauc library.
"""
from typing import Optional, Sequence


class McfAucError(Exception):
    """Base exception for all mcfauc errors."""
    pass


class CohortValidationError(McfAucError, ValueError):
    """Raised when subject or event data violates the cohort invariants."""

    def __init__(self, message: str, row: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.row = row
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        location = ""
        if self.source:
            location = f"{self.source} "
        if self.row is not None:
            location += f"row {self.row}: "
        elif location:
            location = location.rstrip() + ": "
        return f"{location}{self.message}"


class NoCovariatesError(CohortValidationError):
    """Raised when covariate adjustment is requested on a cohort with p = 0."""
    pass


class HorizonError(McfAucError):
    """Raised when the horizon tau cannot be supported by the observed risk set."""
    pass


class DegenerateEstimateError(McfAucError):
    """Raised when a point estimate or variance is undefined (zero AUC, variance <= 0)."""
    pass


class SingularCovariatesError(McfAucError):
    """Raised when a per-arm Gram matrix of the covariates is singular."""

    def __init__(self, message: str, columns: Sequence[str] = ()):
        self.columns = tuple(columns)
        super().__init__(message)


class ScenarioError(McfAucError, ValueError):
    """Raised when a simulation scenario is not valid."""
    pass


class StudyAbortedError(McfAucError):
    """Raised when too many simulation replicates fail."""

    def __init__(self, message: str, failures: Sequence[str] = ()):
        self.failures = tuple(failures)
        super().__init__(message)


class AnalysisConfigError(McfAucError, ValueError):
    """Raised when analysis settings (tau, alpha, estimand, endpoint) are invalid."""
    pass


class ConfigurationError(McfAucError, ValueError):
    """Raised when the user configuration file holds invalid settings."""
    pass
