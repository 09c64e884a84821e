"""
catclust.exceptions
~~~~~~~~~~~~~~~~~~~

This module contains the set of catclust's exceptions.
"""

from __future__ import annotations


class CatclustError(Exception):
    """Base exception used by this package."""


class ContractViolation(CatclustError, ValueError):
    """An operation was called outside of its preconditions."""


class ConfigError(CatclustError):
    """A configuration value (flag or environment override) is invalid."""


class ParseError(CatclustError):
    """An input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlphabetError(ParseError):
    """A symbol does not belong to the declared alphabet."""


class RelationArityError(ParseError):
    """A relation tuple does not have the declared arity."""


class WorkCeilingExceeded(CatclustError):
    """The estimated search space is larger than the configured ceiling."""

    def __init__(self, what: str, estimate: int, ceiling: int) -> None:
        self.estimate = estimate
        self.ceiling = ceiling
        super().__init__(
            f"{what}: estimated work {estimate} exceeds ceiling {ceiling}"
        )


class OracleSizeError(WorkCeilingExceeded):
    """The exhaustive oracle would enumerate more states than its guard allows."""


class InvalidSolutionError(CatclustError):
    """A solution does not have the shape an operation requires."""
