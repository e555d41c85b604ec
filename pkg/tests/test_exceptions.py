"""Tests for domain exception hierarchy."""

from __future__ import annotations

import pickle
import unittest

from weil_lift.exceptions import (
    ClassEnumerationError,
    CoefficientShortageError,
    ConfigValidationError,
    DegenerateModuleError,
    HeightError,
    InputValidationError,
    IntegralityError,
    PrecisionError,
    QuadratureError,
    WeilLiftError,
)


class ExceptionHierarchyTests(unittest.TestCase):
    """Validate exception inheritance contract."""

    def test_exception_hierarchy(self) -> None:
        for error in (InputValidationError, ConfigValidationError, PrecisionError, DegenerateModuleError, ClassEnumerationError):
            self.assertTrue(issubclass(error, WeilLiftError), error)
        for error in (QuadratureError, HeightError, CoefficientShortageError, IntegralityError):
            self.assertTrue(issubclass(error, PrecisionError), error)
        self.assertTrue(issubclass(InputValidationError, ValueError))

    def test_diagnostics_are_carried(self) -> None:
        self.assertEqual(CoefficientShortageError("short", required=400).required, 400)
        self.assertEqual(HeightError("low", achieved=0.2).achieved, 0.2)
        self.assertEqual(IntegralityError("far", distance="1e-3").distance, "1e-3")
        self.assertEqual(QuadratureError("stuck").panels, [])

    def test_diagnostics_survive_pickling(self) -> None:
        for error, attribute in (
            (CoefficientShortageError("short", required=400), "required"),
            (HeightError("low", achieved=0.2), "achieved"),
            (IntegralityError("far", distance="1e-3"), "distance"),
            (QuadratureError("stuck", panels=[("0", "1", "1e-3")]), "panels"),
        ):
            copy = pickle.loads(pickle.dumps(error))
            self.assertIs(type(copy), type(error))
            self.assertEqual(str(copy), str(error))
            self.assertEqual(getattr(copy, attribute), getattr(error, attribute))


if __name__ == "__main__":
    unittest.main()
