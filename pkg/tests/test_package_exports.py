"""Tests for top-level package lazy exports."""

from __future__ import annotations

import unittest

import weil_lift


class PackageExportTests(unittest.TestCase):
    """Ensure __getattr__ and exported symbols behave as expected."""

    def test_lazy_exports_resolve_known_symbols(self) -> None:
        self.assertTrue(callable(weil_lift.load_config))
        self.assertTrue(callable(weil_lift.cm_norm))
        self.assertTrue(callable(weil_lift.rankin_selberg_L))
        self.assertTrue(issubclass(weil_lift.InputValidationError, weil_lift.WeilLiftError))
        self.assertIsNotNone(weil_lift.FiniteQuadraticModule)
        self.assertIsNotNone(weil_lift.Newform)

    def test_every_exported_name_resolves(self) -> None:
        self.assertEqual(weil_lift.__all__, sorted(weil_lift.__all__))
        for name in weil_lift.__all__:
            self.assertIsNotNone(getattr(weil_lift, name), name)

    def test_unknown_symbol_raises_attribute_error(self) -> None:
        with self.assertRaises(AttributeError):
            weil_lift.THIS_DOES_NOT_EXIST


if __name__ == "__main__":
    unittest.main()
