"""Tests for Legendre functions, Green functions, CM cycles and hauptmodul norms."""

from __future__ import annotations

import unittest

import mpmath as mp

from weil_lift.cmvalues import (
    cm_cycle,
    cm_norm,
    galois_counts,
    green_g,
    green_Gkf,
    green_GN,
    green_on_cycle,
    heegner_form_for,
    hecke_on_z1,
    hecke_on_z2,
    legendre_Q,
)
from weil_lift.exceptions import InputValidationError


class PrecisionCase(unittest.TestCase):
    def setUp(self) -> None:
        self._prec = mp.mp.prec
        mp.mp.prec = 128

    def tearDown(self) -> None:
        mp.mp.prec = self._prec


def _moebius(matrix, z):
    (a, b), (c, d) = matrix
    return (a * z + b) / (c * z + d)


class LegendreTests(PrecisionCase):
    """Q_(s-1)(t) through its integral and hypergeometric representations."""

    def test_closed_forms(self) -> None:
        for method in ("integral", "hypergeometric"):
            self.assertLess(abs(legendre_Q(1, 2, method) - mp.log(3) / 2), 1e-20, method)
            self.assertLess(abs(legendre_Q(2, 3, method) - (mp.mpf(3) / 2 * mp.log(2) - 1)), 1e-20, method)

    def test_methods_agree_off_the_integers(self) -> None:
        for s, t in ((mp.mpf("2.5"), mp.mpf("1.2")), (mp.mpc(3, 1), mp.mpf(4)), (mp.mpf("0.75"), mp.mpf(10))):
            integral = legendre_Q(s, t, "integral")
            series = legendre_Q(s, t, "hypergeometric")
            self.assertLess(abs(integral - series), 1e-18 * max(abs(series), 1), (s, t))

    def test_legendre_equation(self) -> None:
        s = mp.mpf("2.5")
        t = mp.mpf("1.7")

        def Q(x):
            return legendre_Q(s, x, "hypergeometric")

        residual = (1 - t * t) * mp.diff(Q, t, 2) - 2 * t * mp.diff(Q, t) + s * (s - 1) * Q(t)
        self.assertLess(abs(residual), 1e-20)

    def test_rejects_bad_arguments(self) -> None:
        with self.assertRaises(InputValidationError):
            legendre_Q(2, 1)
        with self.assertRaises(InputValidationError):
            legendre_Q(2, mp.mpc(2, 1))
        with self.assertRaises(InputValidationError):
            legendre_Q(-1, 2, "integral")
        with self.assertRaises(InputValidationError):
            legendre_Q(2, 2, "series")


class GreenFunctionTests(PrecisionCase):
    """Point-pair invariants and their Gamma_0(N) averages."""

    def setUp(self) -> None:
        super().setUp()
        self.z1 = mp.mpc("0.1", "1.1")
        self.z2 = mp.mpc("0.3", "0.7")

    def test_point_pair_invariant(self) -> None:
        base = green_g(3, self.z1, self.z2)
        root = mp.sqrt(2)
        for matrix in (((2, 1), (3, 2)), ((root, 0), (0, 1 / root)), ((0, -1), (1, 0))):
            moved = green_g(3, _moebius(matrix, self.z1), _moebius(matrix, self.z2))
            self.assertLess(abs(moved - base), 1e-25, matrix)
        self.assertLess(abs(green_g(3, self.z2, self.z1) - base), 1e-25)

    def test_diagonal_is_rejected(self) -> None:
        with self.assertRaises(InputValidationError):
            green_g(3, self.z1, self.z1)
        with self.assertRaises(InputValidationError):
            green_GN(3, 1, mp.mpc(0, 1), mp.mpc(1, 1), cutoff=20)

    def test_averaged_green_function_is_invariant_and_symmetric(self) -> None:
        base = green_GN(3, 3, self.z1, self.z2, cutoff=200)
        self.assertGreater(base.terms, 1)
        for gamma in (((1, 0), (3, 1)), ((2, 1), (3, 2)), ((1, 5), (0, 1))):
            moved = green_GN(3, 3, self.z1, _moebius(gamma, self.z2), cutoff=200)
            self.assertEqual(moved.terms, base.terms, gamma)
            self.assertLess(abs(moved.value - base.value), 1e-20, gamma)
        swapped = green_GN(3, 3, self.z2, self.z1, cutoff=200)
        self.assertLess(abs(swapped.value - base.value), 1e-20)

    def test_doubling_the_cutoff_stays_within_the_tail(self) -> None:
        coarse = green_GN(4, 1, self.z1, self.z2, cutoff=100)
        fine = green_GN(4, 1, self.z1, self.z2, cutoff=200)
        self.assertGreater(fine.terms, coarse.terms)
        self.assertLess(fine.tail, coarse.tail)
        self.assertLess(abs(fine.value - coarse.value), coarse.tail + fine.tail)

    def test_needs_convergent_exponent(self) -> None:
        with self.assertRaises(InputValidationError):
            green_GN(1, 1, self.z1, self.z2)
        with self.assertRaises(InputValidationError):
            green_GN(3, 1, self.z1, self.z2, cutoff=1)

    def test_hecke_operator_is_symmetric(self) -> None:
        def G(a, b):
            return green_GN(6, 1, a, b, cutoff=60)

        left = hecke_on_z1(G, 2, 1, self.z1, self.z2)
        right = hecke_on_z2(G, 2, 1, self.z1, self.z2)
        self.assertLess(abs(left.value - right.value), left.tail + right.tail)

    def test_hecke_sum_on_plain_functions(self) -> None:
        total = hecke_on_z2(lambda a, b: mp.im(b), 4, 1, self.z1, self.z2)
        # a = 1, 2, 4 contribute d copies of a y/d each
        self.assertLess(abs(total - 7 * mp.im(self.z2)), 1e-25)

    def test_higher_green_function_is_linear_in_the_principal_part(self) -> None:
        single = green_Gkf(4, [(1, 1)], 1, self.z1, self.z2, cutoff=40)
        double = green_Gkf(4, [(1, 2)], 1, self.z1, self.z2, cutoff=40)
        self.assertLess(abs(double.value - 2 * single.value), 1e-25)
        with self.assertRaises(InputValidationError):
            green_Gkf(4, [(1, -1)], 1, self.z1, self.z2)
        with self.assertRaises(InputValidationError):
            green_Gkf(1, [(1, 1)], 1, self.z1, self.z2)


class CMCycleTests(PrecisionCase):
    """Admissible Heegner pairs and their Galois-orbit counts."""

    def test_cycle_sizes(self) -> None:
        for (D1, D2), expected in {(-15, -35): 8, (-3, -7): 4, (-23, -4): 12}.items():
            cycle = cm_cycle(D1, D2)
            self.assertEqual(len(cycle), expected, (D1, D2))
            self.assertEqual(galois_counts(D1, D2).over_Q, expected, (D1, D2))

    def test_common_prime_halves_the_classes(self) -> None:
        cycle = cm_cycle(-15, -35)
        self.assertEqual(cycle.classes, 2)
        self.assertEqual(galois_counts(-15, -35).over_K, 2)

    def test_conjugate_blocks(self) -> None:
        cycle = cm_cycle(-23, -4)
        for index in range(0, len(cycle), 4):
            (z1, z2), (w1, w2), (u1, u2), (v1, v2) = cycle.pairs[index : index + 4]
            self.assertLess(abs(w1.tau + mp.conj(z1.tau)), 1e-30)
            self.assertLess(abs(w2.tau + mp.conj(z2.tau)), 1e-30)
            self.assertEqual(u2, z2)
            self.assertEqual(v1, z1)

    def test_heegner_branch_is_respected(self) -> None:
        for beta in (1, 5):
            form = heegner_form_for(-11, 3, beta)
            self.assertEqual(form.disc, -11)
            self.assertEqual(form.a % 3, 0)
            self.assertEqual((form.b - beta) % 6, 0)
        with self.assertRaises(InputValidationError):
            heegner_form_for(-11, 3, 2)
        cycle = cm_cycle(-11, -8, 3, beta1=5)
        self.assertTrue(all(pair[0].form.b % 6 in (1, 5) for pair in cycle.pairs))

    def test_preconditions(self) -> None:
        for D1, D2, N in ((-7, -7, 1), (-4, -8, 1), (5, -7, 1), (-3, -7, 2), (-3, -7, 9), (-3, -12, 1)):
            with self.assertRaises(InputValidationError, msg=(D1, D2, N)):
                cm_cycle(D1, D2, N)

    def test_green_sum_over_cycle_is_real(self) -> None:
        cycle = cm_cycle(-3, -4)
        total = green_on_cycle(4, [(1, 1)], 1, cycle, cutoff=30)
        z1, z2 = cycle.pairs[0]
        direct = green_Gkf(4, [(1, 1)], 1, z1.tau, z2.tau, cutoff=30)
        mixed = green_Gkf(4, [(1, 1)], 1, z1.conjugate().tau, z2.tau, cutoff=30)
        self.assertLess(abs(mp.im(total.value)), 1e-25)
        self.assertLess(abs(total.value - 2 * (direct.value + mixed.value)), 1e-20)


class CMNormTests(unittest.TestCase):
    """Integrality and factorization of products of hauptmodul differences."""

    def test_j_differences_at_level_one(self) -> None:
        certificate = cm_norm(1, -3, -7)
        self.assertEqual(certificate.nearest, 3375**4)
        self.assertEqual(certificate.factors, {3: 12, 5: 12})
        self.assertFalse(certificate.is_unit)
        self.assertEqual(certificate.pairs, 4)
        self.assertLess(certificate.distance, 1e-30)
        self.assertEqual(cm_norm(1, -3, -4).nearest, 1728**4)

    def test_translation_does_not_change_the_norm(self) -> None:
        self.assertEqual(cm_norm(1, -3, -7, shift=3).nearest, 3375**4)
        self.assertEqual(cm_norm(1, -23, -4).nearest, cm_norm(1, -23, -4, shift=-2).nearest)

    def test_level_three_norm_is_a_nontrivial_integer(self) -> None:
        certificate = cm_norm(3, -11, -8)
        self.assertGreater(abs(certificate.nearest), 1)
        self.assertLess(certificate.distance, 1e-10)
        self.assertEqual(certificate.bits % 2, 0)
        payload = certificate.as_dict()
        self.assertEqual(payload["nearest_integer"], str(certificate.nearest))

    def test_unsupported_level(self) -> None:
        with self.assertRaises(InputValidationError):
            cm_norm(11, -7, -8)

    def test_certificate_independent_of_worker_count(self) -> None:
        serial = cm_norm(1, -3, -7, bits=160, threads=1)
        pooled = cm_norm(1, -3, -7, bits=160, threads=4)
        self.assertEqual(serial.bits, pooled.bits)
        self.assertEqual(serial.nearest, pooled.nearest)
        self.assertEqual(serial.product.real, pooled.product.real)
        self.assertEqual(serial.product.imag, pooled.product.imag)
        self.assertEqual(serial.distance, pooled.distance)

    def test_green_sum_independent_of_worker_count(self) -> None:
        cycle = cm_cycle(-3, -4)
        with mp.workprec(128):
            serial = green_on_cycle(4, [(1, 1)], 1, cycle, cutoff=20, threads=1)
            pooled = green_on_cycle(4, [(1, 1)], 1, cycle, cutoff=20, threads=2)
        self.assertEqual(serial.value, pooled.value)
        self.assertEqual(serial.terms, pooled.terms)


if __name__ == "__main__":
    unittest.main()
