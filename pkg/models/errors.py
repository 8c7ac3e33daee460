from enum import Enum
from typing import Any

__all__ = (
    "ErrorKind",
    "ToolkitError",
    "SemigroupDomainError",
    "NonConvergenceError",
    "InvalidModelError",
    "InvariantViolationError",
    "ToolkitIOError",
)


class ErrorKind(str, Enum):
    SEMIGROUP_DOMAIN = "SemigroupDomain"
    NON_CONVERGENCE = "NonConvergence"
    INVALID_MODEL = "InvalidModel"
    INVARIANT_VIOLATION = "InvariantViolation"
    IO_ERROR = "IoError"


class ToolkitError(Exception):
    """Base error for every contract violation raised by the toolkit."""

    kind: ErrorKind = ErrorKind.INVARIANT_VIOLATION

    def __init__(self, message: str, **context: Any) -> None:
        if not message:
            raise ValueError("ToolkitError requires a message")
        super().__init__(message)
        self.message = message
        self.context: dict[str, Any] = context

    def __str__(self) -> str:
        text = f"[{self.kind.value}] {self.message}"
        if self.context:
            details = ", ".join(f"{k}={v}" for k, v in self.context.items())
            text += f" ({details})"
        return text


class SemigroupDomainError(ToolkitError):
    kind = ErrorKind.SEMIGROUP_DOMAIN


class NonConvergenceError(ToolkitError):
    kind = ErrorKind.NON_CONVERGENCE


class InvalidModelError(ToolkitError):
    kind = ErrorKind.INVALID_MODEL


class InvariantViolationError(ToolkitError):
    kind = ErrorKind.INVARIANT_VIOLATION


class ToolkitIOError(ToolkitError):
    kind = ErrorKind.IO_ERROR
