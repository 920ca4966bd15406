"""
Error hierarchy of the lab.

Every error derives from `LabError` and from the closest builtin exception, so
callers can catch either the lab type or the builtin one.
"""

from typing import Any


class LabError(Exception):
    """Base class for every error raised by the lab."""


class DomainError(LabError, ValueError):
    """An argument lies outside the domain of the operation."""


class OverflowSignal(LabError, ArithmeticError):
    """A value exceeds the representable floating point range."""


class GaugeMismatch(LabError, ValueError):
    """The coupling constant is incompatible with the requested gauge."""


class NoConvergence(LabError, RuntimeError):
    """An iterative or adaptive procedure missed its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    result : Any, optional
        The best result obtained before giving up.
    """

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class DivergentFactor(LabError, ArithmeticError):
    """The inner factor of the B-constant diverges on the whole grid."""


class ZeroDenominator(LabError, ZeroDivisionError):
    """The right-hand side of an inequality vanishes identically."""


class NegativeInput(LabError, ValueError):
    """A nonnegative profile was expected."""


class MonotonicityViolation(LabError, ValueError):
    """A sequence or weight expected to be monotone is not."""


class NoHatR(LabError, ValueError):
    """No radius below r_q dominates the weight on [r_q, R]."""


class BracketFailure(LabError, RuntimeError):
    """Both ends of an exponent bracket received the same verdict."""

    def __init__(self, message: str, table: Any = None) -> None:
        super().__init__(message)
        self.table = table


class GeometryError(LabError, ValueError):
    """A translated bump does not fit inside the unit disk."""


class IoError(LabError, OSError):
    """Writing a result file failed."""


class AliasWarning(UserWarning):
    """The highest resolved angular mode carries a non-negligible energy share."""


__all__: list[str] = [
    "AliasWarning",
    "BracketFailure",
    "DivergentFactor",
    "DomainError",
    "GaugeMismatch",
    "GeometryError",
    "IoError",
    "LabError",
    "MonotonicityViolation",
    "NegativeInput",
    "NoConvergence",
    "NoHatR",
    "OverflowSignal",
    "ZeroDenominator",
]
