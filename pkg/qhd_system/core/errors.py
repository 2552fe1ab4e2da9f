"""
Error Types Module.

Exception hierarchy shared by the core algorithms and the command line front end.
"""

from typing import Any, Optional


class QGameError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(QGameError, ValueError):
    """An input value is not acceptable.

    Args:
        message: Human readable description
        field: Name of the offending field, if known
    """

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DomainError(ValidationError):
    """A numeric argument lies outside its documented interval."""


class NormalizationError(ValidationError):
    """Amplitudes of an initial state are not normalized within tolerance."""

    def __init__(self, message: str, norm_squared: float):
        super().__init__(message, field="state")
        self.norm_squared = norm_squared


class DegenerateGameError(QGameError):
    """The mixed-strategy indifference equation has a vanishing denominator."""


class SymmetryError(QGameError):
    """A symmetric-game operation received asymmetric payoff surfaces."""


class SimulationError(QGameError):
    """Replicator iteration produced a non-finite fitness value."""

    def __init__(self, message: str, generation: int):
        super().__init__(message)
        self.generation = generation


class ConfigError(QGameError):
    """Base class for configuration document problems.

    Args:
        message: Description of the problem
        line: 1-based line number, if known
        column: 1-based column number, if known
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.line = line
        self.column = column


class ConfigSyntaxError(ConfigError):
    """The document is not well formed."""


class UnknownKeyError(ConfigError):
    """A section or key is not part of the documented grammar."""


class MissingSectionError(ConfigError):
    """A mandatory section is absent."""


class ConfigDomainError(ConfigError):
    """A well-formed value lies outside its allowed range."""

    def __init__(self, field: str, value: Any, allowed: str, line: Optional[int] = None):
        super().__init__(f"{field} = {value!r} is outside the allowed range {allowed}", line)
        self.field = field
        self.value = value
        self.allowed = allowed
