"""
Exception hierarchy for the disease-burden forecasting tools.

Every error raised on purpose by the library derives from BurdenError.
The three families decide the exit code of the command-line tools:

    ValidationError   -> 1  (bad input, bad configuration, bad expression)
    NumericalError    -> 2  (no convergence, empty Pareto front, domain failure)
    InputOutputError  -> 3  (missing or unreadable files)
"""

from __future__ import annotations

from enum import Enum
from typing import Optional


class BurdenError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message
        self.stage: Optional[str] = None

    def with_stage(self, stage: str) -> "BurdenError":
        """Tag the error with the pipeline stage it escaped from."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ValidationError(BurdenError, ValueError):
    exit_code = 1


class NumericalError(BurdenError):
    exit_code = 2


class InputOutputError(BurdenError):
    exit_code = 3


# ---- ingest ---- #

class MissingFile(InputOutputError):
    def __init__(self, path: str) -> None:
        super().__init__(f"file not found: {path}")
        self.path = path


class MalformedRow(ValidationError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None) -> None:
        where = []
        if row is not None:
            where.append(f"line {row}")
        if column is not None:
            where.append(f"column '{column}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")
        self.row = row
        self.column = column


class GapInYears(ValidationError):
    def __init__(self, before: int, after: int) -> None:
        super().__init__(f"years are not consecutive: {before} is followed by {after}")
        self.before = before
        self.after = after


class UnmappedCause(ValidationError):
    def __init__(self, cause: str) -> None:
        super().__init__(f"cause '{cause}' has no group in the group config")
        self.cause = cause


class NegativeValue(ValidationError):
    def __init__(self, cause: str, year: int, value: float) -> None:
        super().__init__(f"negative DALY value {value} for '{cause}' in {year}")
        self.cause = cause
        self.year = year
        self.value = value


class InvalidGroupConfig(ValidationError):
    pass


class ConstantColumn(ValidationError):
    def __init__(self, cause: str) -> None:
        super().__init__(f"column '{cause}' is constant (zero variance)")
        self.cause = cause


class TooFewRows(ValidationError):
    pass


class TooFewColumns(ValidationError):
    pass


class NonPositiveIndex(ValidationError):
    def __init__(self, year: int, offset_year: int) -> None:
        super().__init__(
            f"year {year} maps to t={year - offset_year} with offset {offset_year}; t must be >= 1"
        )
        self.year = year
        self.offset_year = offset_year


# ---- pca ---- #

class NotSymmetric(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NoConvergence(NumericalError):
    pass


# ---- expressions ---- #

class DomainReason(str, Enum):
    DIV_BY_ZERO = "div_by_zero"
    LOG_NON_POSITIVE = "log_non_positive"
    OVERFLOW = "overflow"


class DomainError(NumericalError):
    def __init__(self, reason: DomainReason, year: Optional[int] = None) -> None:
        self.reason = DomainReason(reason)
        self.year = year
        text = f"domain error: {self.reason.value}"
        if year is not None:
            text += f" (year {year})"
        super().__init__(text)

    def at_year(self, year: int) -> "DomainError":
        return DomainError(self.reason, year=year)


class InvalidExpression(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExponentNotInteger(ParseError):
    pass


class UnknownIndex(ValidationError):
    def __init__(self, index_id: str) -> None:
        super().__init__(f"unknown index '{index_id}'")
        self.index_id = index_id


# ---- metrics ---- #

class LengthMismatch(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


# ---- search ---- #

class ConfigError(ValidationError):
    pass


class EmptyFront(NumericalError):
    pass


# ---- forecast ---- #

class TooFewForecastRows(ValidationError):
    pass
