"""Exception types shared across the package."""

from __future__ import annotations


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the 0-based byte offset."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownVariableError(ExprSyntaxError):
    def __init__(self, name: str, offset: int) -> None:
        super().__init__(f"unknown variable {name!r}", offset)
        self.name = name


class DomainError(ValueError):
    """A function was evaluated outside its domain."""


class IntegrabilityError(ValueError):
    """An integrand is not (numerically) integrable near the origin."""


class ProblemError(ValueError):
    """Inadmissible problem parameters (e.g. ``p > 1/beta`` violated)."""


class HorizonCollapseError(RuntimeError):
    """The Omega-argument leaves the domain of the inverse for every t > 0."""


class InconclusiveError(RuntimeError):
    """A numeric test landed inside its undecidable margin band."""


class ConvergenceError(RuntimeError):
    """An iteration did not converge; ``result`` holds the last iterate if any."""

    def __init__(self, message: str, result: object = None) -> None:
        super().__init__(message)
        self.result = result


class BlowUpError(ConvergenceError):
    """Iterates exceeded the blow-up threshold."""


class ConfigError(ValueError):
    """Invalid or incomplete CLI configuration."""
