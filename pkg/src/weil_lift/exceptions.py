"""Domain exception hierarchy for weil-lift computations."""

from __future__ import annotations


class WeilLiftError(RuntimeError):
    """Base class for all domain-level errors."""


class InputValidationError(WeilLiftError, ValueError):
    """Raised when an operation's preconditions are violated."""


class ConfigValidationError(WeilLiftError):
    """Raised when configuration cannot be validated safely."""


class PrecisionError(WeilLiftError):
    """Raised when the working precision is insufficient for a certified result."""


class DegenerateModuleError(WeilLiftError):
    """Raised when a finite quadratic module has a degenerate bilinear form."""


class ClassEnumerationError(WeilLiftError):
    """Raised when a class enumeration exceeds its discriminant cap."""


class QuadratureError(PrecisionError):
    """Raised when adaptive quadrature fails to converge."""

    def __init__(self, message: str, panels: list[tuple[str, str, str]] | None = None):
        super().__init__(message)
        self.panels = panels or []

    def __reduce__(self) -> tuple[type, tuple[str, list[tuple[str, str, str]]]]:
        return type(self), (str(self), self.panels)


class HeightError(PrecisionError):
    """Raised when a point cannot be moved high enough for series evaluation."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved

    def __reduce__(self) -> tuple[type, tuple[str, float]]:
        return type(self), (str(self), self.achieved)


class CoefficientShortageError(PrecisionError):
    """Raised when a newform carries too few coefficients for the target accuracy."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required

    def __reduce__(self) -> tuple[type, tuple[str, int]]:
        return type(self), (str(self), self.required)


class IntegralityError(PrecisionError):
    """Raised when a product that must be an integer is not close to one."""

    def __init__(self, message: str, distance: str):
        super().__init__(message)
        self.distance = distance

    def __reduce__(self) -> tuple[type, tuple[str, str]]:
        return type(self), (str(self), self.distance)
