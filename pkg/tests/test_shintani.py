"""Tests for cycle integrals, twisted traces and Shintani-lift coefficient ratios."""

from __future__ import annotations

from fractions import Fraction
import unittest

import mpmath as mp

from weil_lift.bqf import BQF
from weil_lift.exceptions import InputValidationError
from weil_lift.lfunc import modular_Lambda
from weil_lift.qexp import delta_newform, level3_weight6_newform
from weil_lift.shintani import (
    calibrate_shintani_constant,
    cycle_integral,
    kohnen_series_check,
    shintani_coeff_ratio,
    shintani_coefficients,
    shintani_constant,
    twisted_trace,
)

TOLERANCE = 1e-10


class PrecisionCase(unittest.TestCase):
    def setUp(self) -> None:
        self._prec = mp.mp.prec
        mp.mp.prec = 128

    def tearDown(self) -> None:
        mp.mp.prec = self._prec


class CycleIntegralTests(PrecisionCase):
    """Geodesic integrals of Delta against powers of a quadratic form."""

    def setUp(self) -> None:
        super().setUp()
        self.G = delta_newform()

    def test_class_invariance(self) -> None:
        Q = BQF(1, 1, -1)
        base = cycle_integral(self.G, Q, tolerance=TOLERANCE)
        for gamma in (((2, 1), (1, 1)), ((1, 3), (0, 1)), ((0, -1), (1, 0))):
            moved = cycle_integral(self.G, Q.act(gamma), tolerance=TOLERANCE)
            self.assertLess(abs(moved.value - base.value), 1e-8 * max(abs(base.value), 1))

    def test_negated_form_picks_up_parity_sign(self) -> None:
        Q = BQF(1, 1, -1)
        plus = cycle_integral(self.G, Q, tolerance=TOLERANCE).value
        minus = cycle_integral(self.G, Q.negate(), tolerance=TOLERANCE).value
        # k = 6: the reversed orientation and (-Q)^(k-1) cancel
        self.assertLess(abs(plus - minus), 1e-8 * max(abs(plus), 1))

    def test_doubled_quadrature_order_agrees(self) -> None:
        Q = BQF(1, 1, -1)
        coarse = cycle_integral(self.G, Q, order=32, tolerance=TOLERANCE).value
        fine = cycle_integral(self.G, Q, order=64, tolerance=TOLERANCE).value
        self.assertLess(abs(coarse - fine), 1e-8 * max(abs(fine), 1))

    def test_square_discriminant_vertical_line(self) -> None:
        upward = cycle_integral(self.G, BQF(0, 1, 0), tolerance=TOLERANCE)
        downward = cycle_integral(self.G, BQF(0, -1, 0), tolerance=TOLERANCE)
        self.assertGreater(abs(upward.value), 0)
        self.assertLess(abs(upward.value - downward.value), 1e-8 * abs(upward.value))

    def test_rejects_bad_input(self) -> None:
        with self.assertRaises(InputValidationError):
            cycle_integral(self.G, BQF(1, 1, 1))
        with self.assertRaises(InputValidationError):
            cycle_integral(level3_weight6_newform(), BQF(1, 1, -1))


class TwistedTraceTests(PrecisionCase):
    """Traces over Gamma_0(N)-classes and the plus-space Hecke relation."""

    def test_wrong_congruence_class_is_exactly_zero(self) -> None:
        G = delta_newform()
        for m in (2, 3, 6, 7):
            trace = twisted_trace(G, 1, m)
            self.assertEqual(trace.value, 0)
            self.assertEqual(trace.classes, 0)

    def test_twist_sign_is_checked(self) -> None:
        with self.assertRaises(InputValidationError):
            twisted_trace(delta_newform(), -4, 1)
        with self.assertRaises(InputValidationError):
            twisted_trace(level3_weight6_newform(), 5, 3)
        with self.assertRaises(InputValidationError):
            twisted_trace(delta_newform(), 9, 1)

    def test_first_trace_is_real_and_nonzero(self) -> None:
        trace = twisted_trace(delta_newform(), 1, 1, tolerance=TOLERANCE)
        self.assertEqual(trace.classes, 1)
        self.assertGreater(abs(trace.value), 1e-6)
        self.assertLess(abs(mp.im(trace.value)), 1e-10 * abs(trace.value))

    def test_delta_ratios_follow_hecke_relation(self) -> None:
        G = delta_newform()
        traces = shintani_coefficients(G, 1, (1, 4, 5, 9, 20), tolerance=TOLERANCE)
        t = {trace.index: trace.value for trace in traces}
        expected = {(4, 1): -56, (9, 1): 9, (20, 5): 8}
        for (top, bottom), value in expected.items():
            self.assertLess(abs(t[top] / t[bottom] - value), 1e-5, (top, bottom))

    def test_traces_independent_of_worker_count(self) -> None:
        G = delta_newform()
        serial = shintani_coefficients(G, 1, (1, 4, 5, 8), threads=1, tolerance=TOLERANCE)
        pooled = shintani_coefficients(G, 1, (1, 4, 5, 8), threads=4, tolerance=TOLERANCE)
        self.assertEqual([t.index for t in pooled], [1, 4, 5, 8])
        for a, b in zip(serial, pooled, strict=True):
            self.assertEqual(a.value.real, b.value.real)
            self.assertEqual(a.value.imag, b.value.imag)
            self.assertEqual(a.classes, b.classes)

    def test_ratio_helper(self) -> None:
        G = delta_newform()
        self.assertLess(abs(shintani_coeff_ratio(G, 1, 1, 1, tolerance=TOLERANCE) - 1), 1e-12)
        ratio = shintani_coeff_ratio(G, 1, 45, 5, tolerance=TOLERANCE)
        self.assertLess(abs(ratio - 495), 1e-5)

    def test_level_three_ratios_at_two_base_indices(self) -> None:
        G = level3_weight6_newform()
        a5 = G.coefficient(5)
        ratio = shintani_coeff_ratio(G, -4, 175, 7, tolerance=TOLERANCE)
        self.assertLess(abs(ratio - (a5 + 25)), 1e-5)
        ratio = shintani_coeff_ratio(G, -4, 100, 4, tolerance=TOLERANCE)
        self.assertLess(abs(ratio - (a5 - 25)), 1e-5)

    def test_level_three_ratio_at_the_bad_prime(self) -> None:
        # 9 | m with 3 | N: imprimitive forms of content 3 enter the trace once per class.
        G = level3_weight6_newform()
        ratio = shintani_coeff_ratio(G, -4, 63, 7, tolerance=TOLERANCE)
        self.assertLess(abs(ratio - G.coefficient(3)), 1e-5)

    def test_parity_split_adds_up(self) -> None:
        G = delta_newform()
        whole = twisted_trace(G, 1, 5, tolerance=TOLERANCE).value
        even = twisted_trace(G, 1, 5, parity=0, tolerance=TOLERANCE).value
        odd = twisted_trace(G, 1, 5, parity=1, tolerance=TOLERANCE).value
        self.assertLess(abs(even + odd - whole), 1e-8 * abs(whole))

    def test_shintani_constant(self) -> None:
        self.assertEqual(shintani_constant(6), Fraction(1, 384))
        self.assertEqual(shintani_constant(3), Fraction(-1, 48))

    def test_trivial_twist_trace_is_the_completed_L_value(self) -> None:
        # t(1) for Delta is the single vertical cycle [0, 1, 0]: 5! (2 pi)^-6 L(Delta, 6).
        trace = twisted_trace(delta_newform(), 1, 1, tolerance=TOLERANCE)
        expected = modular_Lambda(delta_newform(), 6).value
        self.assertEqual(trace.classes, 1)
        self.assertLess(abs(trace.value - expected), 1e-8 * abs(expected))
        self.assertGreater(mp.re(trace.value), 0)

    def test_calibration_confirms_the_recorded_sign(self) -> None:
        calibration = calibrate_shintani_constant(delta_newform(), 1, tolerance=TOLERANCE)
        self.assertEqual(calibration.measured_sign, 1)
        self.assertEqual(calibration.pinned, Fraction(1, 384))
        self.assertTrue(calibration.agrees)
        self.assertTrue(calibration.as_dict()["agrees"])


class KohnenIdentityTests(PrecisionCase):
    """The truncated Dirichlet series of plus-space coefficients against L-values."""

    def test_delta_with_trivial_twist(self) -> None:
        check = kohnen_series_check(delta_newform(), 1, 1, 6, 4, tolerance=TOLERANCE)
        self.assertTrue(check.holds, (check.gap, check.bound))
        self.assertLess(check.gap, 1e-4)
        self.assertLess(abs(check.lhs - 1), 0.1)

    def test_preconditions(self) -> None:
        with self.assertRaises(InputValidationError):
            kohnen_series_check(delta_newform(), 1, -4, 6, 2)
        with self.assertRaises(InputValidationError):
            kohnen_series_check(delta_newform(), 1, 1, 1, 2)
        with self.assertRaises(InputValidationError):
            kohnen_series_check(delta_newform(), 2, 1, 6, 2)


if __name__ == "__main__":
    unittest.main()
