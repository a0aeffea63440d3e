"""
This module defines custom exceptions for the bound, key-rate and simulation
services. Each exception carries a structured ErrorDetail and the exit status
the management CLI reports for it.
"""

from typing import Optional

from src.utils.run_output import ErrorDetail

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_CONDITION_FAILURE = 3
EXIT_NUMERICAL_DOMAIN = 4


class DecoyBoundException(Exception):
    """
    Custom base error class for all DecoyBound errors, providing a
    structured error detail and an exit code.
    """

    exit_code: int = EXIT_FAILURE

    def __init__(
        self,
        error_detail: ErrorDetail,
        message: str = "An unexpected error occurred.",
    ):
        """
        Initializes the DecoyBoundException.

        Args:
            error_detail: An instance of ErrorDetail providing specific error
            information.
            message: A high-level message for the error.
        """

        self.error_detail = error_detail
        self.message = message

        super().__init__(message)

    def __str__(self) -> str:
        if self.error_detail.details:
            return f"{self.message} ({self.error_detail.details})"
        return self.message


# ======================= Input Errors (exit 2) =======================


class ConfigException(DecoyBoundException):
    """
    Used for missing, malformed or inconsistent run configuration.
    The details always name the offending key.
    """

    exit_code = EXIT_CONFIG_ERROR

    def __init__(
        self,
        error_code: str = "CONFIG_ERROR",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "The run configuration is invalid.",
    ):
        error_detail = ErrorDetail(
            code=error_code, details=details, stack_trace=stack_trace
        )
        super().__init__(error_detail=error_detail, message=message)


class ScenarioException(ConfigException):
    """
    Used when a simulation scenario has invalid fields.
    """

    def __init__(
        self,
        error_code: str = "INVALID_SCENARIO",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "The simulation scenario is invalid.",
    ):
        super().__init__(
            error_code=error_code,
            details=details,
            stack_trace=stack_trace,
            message=message,
        )


class CoverageViolationException(ScenarioException):
    """
    Used when the intensities realized by a simulation escape the declared
    source bounds. This is a scenario bug, not a failure of the bound.
    """

    def __init__(
        self,
        error_code: str = "COVERAGE_VIOLATION",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "Realized source coefficients escape the declared bounds.",
    ):
        super().__init__(
            error_code=error_code,
            details=details,
            stack_trace=stack_trace,
            message=message,
        )


# ======================= Condition Errors (exit 3) =======================


class ConditionFailureException(DecoyBoundException):
    """
    Used when the source bounds fail (or cannot certify) the admissibility
    conditions the single-photon bounds depend on.
    """

    exit_code = EXIT_CONDITION_FAILURE

    def __init__(
        self,
        error_code: str = "CONDITION_FAILURE",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "The source bounds do not satisfy the decoy conditions.",
    ):
        error_detail = ErrorDetail(
            code=error_code, details=details, stack_trace=stack_trace
        )
        super().__init__(error_detail=error_detail, message=message)


# ======================= Numerical Errors (exit 4) =======================


class NumericalDomainException(DecoyBoundException):
    """
    Used when an argument falls outside the domain of a formula.
    """

    exit_code = EXIT_NUMERICAL_DOMAIN

    def __init__(
        self,
        error_code: str = "NUMERICAL_DOMAIN_ERROR",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "An argument is outside the domain of the formula.",
    ):
        error_detail = ErrorDetail(
            code=error_code, details=details, stack_trace=stack_trace
        )
        super().__init__(error_detail=error_detail, message=message)


class NoKeyException(NumericalDomainException):
    """
    Used when there is no single-photon credit left, so no key can be
    distilled.
    """

    def __init__(
        self,
        error_code: str = "NO_SINGLE_PHOTON_CREDIT",
        details: Optional[str] = None,
        stack_trace: Optional[str] = None,
        message: str = "No single-photon credit, no key.",
    ):
        super().__init__(
            error_code=error_code,
            details=details,
            stack_trace=stack_trace,
            message=message,
        )
