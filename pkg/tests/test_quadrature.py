"""Tests for the Gauss-Legendre integrators."""

from __future__ import annotations

import unittest

import mpmath as mp

from weil_lift.exceptions import InputValidationError, QuadratureError
from weil_lift.quadrature import (
    adaptive_integrate,
    gauss_legendre_nodes,
    integrate_until_decay,
    panel,
)


class QuadratureTests(unittest.TestCase):
    """Fixed and adaptive rules at 128 bits."""

    def setUp(self) -> None:
        self._prec = mp.mp.prec
        mp.mp.prec = 128

    def tearDown(self) -> None:
        mp.mp.prec = self._prec

    def test_weights_sum_to_interval_length(self) -> None:
        for n in (2, 5, 32):
            xs, ws = gauss_legendre_nodes(n)
            self.assertEqual(len(xs), n)
            self.assertLess(abs(mp.fsum(ws) - 2), mp.mpf(10) ** -30)

    def test_order_must_be_at_least_two(self) -> None:
        with self.assertRaises(InputValidationError):
            gauss_legendre_nodes(1)

    def test_panel_is_exact_for_polynomials(self) -> None:
        value = panel(lambda x: x**9, mp.mpf(0), mp.mpf(1), order=8)
        self.assertLess(abs(value - mp.mpf(1) / 10), mp.mpf(10) ** -30)

    def test_adaptive_integral_of_exponential(self) -> None:
        result = adaptive_integrate(mp.exp, 0, 1, tolerance=1e-25)
        self.assertLess(abs(result.value - (mp.e - 1)), mp.mpf(10) ** -24)
        self.assertGreater(result.panels, 0)

    def test_adaptive_integral_of_oscillating_function(self) -> None:
        result = adaptive_integrate(lambda x: mp.cos(40 * x), 0, 1, tolerance=1e-20)
        self.assertLess(abs(result.value - mp.sin(40) / 40), mp.mpf(10) ** -20)

    def test_empty_interval(self) -> None:
        result = adaptive_integrate(mp.exp, 1, 1)
        self.assertEqual(result.value, 0)
        self.assertEqual(result.panels, 0)

    def test_nonconvergence_reports_panels(self) -> None:
        with self.assertRaises(QuadratureError) as caught:
            adaptive_integrate(lambda x: 1 / mp.sqrt(x), 0, 1, tolerance=1e-30, max_depth=2)
        self.assertGreater(len(caught.exception.panels), 0)

    def test_integrate_until_decay(self) -> None:
        result = integrate_until_decay(lambda x: mp.exp(-x), 0, tolerance=1e-25)
        self.assertLess(abs(result.value - 1), mp.mpf(10) ** -22)
        left = integrate_until_decay(lambda x: mp.exp(2 * x), 0, direction=-1, tolerance=1e-25)
        self.assertLess(abs(left.value - mp.mpf(1) / 2), mp.mpf(10) ** -22)

    def test_invalid_direction(self) -> None:
        with self.assertRaises(InputValidationError):
            integrate_until_decay(mp.exp, 0, direction=0)

    def test_completion_is_logged(self) -> None:
        with self.assertLogs("weil_lift.quadrature", level="DEBUG") as captured:
            adaptive_integrate(mp.exp, 0, 1)
        self.assertTrue(any(r.getMessage() == "quadrature.done" for r in captured.records))


if __name__ == "__main__":
    unittest.main()
