"""Tests for the integer and rational primitives."""

from __future__ import annotations

from fractions import Fraction
import random
import unittest

import mpmath as mp
from sympy import primerange

from weil_lift.exceptions import InputValidationError
from weil_lift.numtheory import (
    Discriminant,
    chi_on_prime,
    complete_sl2,
    divisors,
    factorization,
    fundamental_part,
    gamma_R,
    gamma_R_ratio,
    heegner_condition,
    is_fundamental,
    kronecker,
    mat_det,
    moebius,
    omega,
    p1_points,
    partial_zeta,
    prime_divisors,
    psi_index,
    relative_character,
    sigma1,
)


class KroneckerTests(unittest.TestCase):
    """Kronecker symbols and fundamental discriminants."""

    def test_examples(self) -> None:
        self.assertEqual(kronecker(1, 17), 1)
        self.assertEqual(kronecker(-7, 3), -1)
        self.assertEqual(kronecker(-3, 7), 1)
        self.assertEqual(kronecker(-4, 2), 0)
        self.assertEqual(kronecker(5, 2), -1)

    def test_periodic_and_multiplicative(self) -> None:
        fundamentals = [D for D in range(-50, 51) if is_fundamental(D) and D != 1]
        for D in fundamentals:
            for n in range(1, 300):
                self.assertEqual(kronecker(D, n + abs(D)), kronecker(D, n), (D, n))
            for m in range(1, 40):
                for n in range(1, 40):
                    self.assertEqual(kronecker(D, m * n), kronecker(D, m) * kronecker(D, n))

    def test_is_fundamental(self) -> None:
        self.assertTrue(is_fundamental(-3))
        self.assertFalse(is_fundamental(-12))
        self.assertTrue(is_fundamental(-8))
        self.assertTrue(is_fundamental(5))
        self.assertFalse(is_fundamental(0))
        self.assertFalse(is_fundamental(-27))

    def test_discriminant_type_validates(self) -> None:
        self.assertTrue(Discriminant(-3).is_odd)
        self.assertFalse(Discriminant(-8).is_odd)
        with self.assertRaises(InputValidationError):
            Discriminant(-12)

    def test_fundamental_part(self) -> None:
        self.assertEqual(fundamental_part(-12), (-3, 2))
        self.assertEqual(fundamental_part(-48), (-3, 4))
        self.assertEqual(fundamental_part(-32), (-8, 2))
        self.assertEqual(fundamental_part(20), (5, 2))
        with self.assertRaises(InputValidationError):
            fundamental_part(7)

    def test_heegner_condition(self) -> None:
        self.assertTrue(heegner_condition(-11, 3))
        self.assertFalse(heegner_condition(-7, 3))
        self.assertTrue(heegner_condition(-7, 1))
        with self.assertRaises(InputValidationError):
            heegner_condition(-11, 9)

    def test_hecke_characters_through_kronecker(self) -> None:
        D1, D2 = -3, -4
        for p in primerange(5, 1000):
            value = relative_character(D1, D2, p)
            self.assertEqual(value, chi_on_prime(D1, D2, p, which=1), p)
            self.assertEqual(value, chi_on_prime(D1, D2, p, which=2), p)
        with self.assertRaises(InputValidationError):
            relative_character(D1, D2, 3)


class ArithmeticFunctionTests(unittest.TestCase):
    """Divisor sums, factorization and level indices."""

    def test_divisor_functions(self) -> None:
        self.assertEqual(sigma1(1), 1)
        self.assertEqual(sigma1(6), 12)
        self.assertEqual(omega(12), 2)
        self.assertEqual(divisors(12), [1, 2, 3, 4, 6, 12])
        self.assertEqual(moebius(30), -1)
        self.assertEqual(moebius(12), 0)

    def test_factorization_round_trip(self) -> None:
        for n in (1, 2, 360, 1001, 2**10 * 3**4):
            fac = factorization(n)
            self.assertEqual(fac.value, n)
            self.assertEqual(list(fac.primes), sorted(fac.primes))
        self.assertEqual(prime_divisors(-84), (2, 3, 7))
        with self.assertRaises(InputValidationError):
            factorization(0)

    def test_projective_line_has_index_many_points(self) -> None:
        for N in (1, 2, 3, 5, 6, 15):
            self.assertEqual(len(p1_points(N)), psi_index(N))
        self.assertEqual(psi_index(6), 12)

    def test_complete_sl2(self) -> None:
        for c, d in ((3, 5), (0, 1), (-4, 7), (6, -5)):
            m = complete_sl2(c, d)
            self.assertEqual(m[1], (c, d))
            self.assertEqual(mat_det(m), 1)
        with self.assertRaises(InputValidationError):
            complete_sl2(2, 4)


class ZetaAndGammaTests(unittest.TestCase):
    """Partial zeta factors and archimedean gamma ratios."""

    def setUp(self) -> None:
        self._prec = mp.mp.prec
        mp.mp.prec = 128

    def tearDown(self) -> None:
        mp.mp.prec = self._prec

    def test_partial_zeta_examples(self) -> None:
        self.assertEqual(partial_zeta(1, 5), Fraction(1))
        self.assertEqual(partial_zeta(3, 1), Fraction(3, 2))
        self.assertEqual(partial_zeta(6, 2), Fraction(3, 2))

    def test_partial_zeta_inverts_euler_factors(self) -> None:
        for N in (2, 6, 30, 35):
            for s in (-3, -1, 1, 2, 5):
                product = partial_zeta(N, s)
                for p in prime_divisors(N):
                    product *= 1 - Fraction(p) ** (-s)
                self.assertEqual(product, 1)

    def test_partial_zeta_pole(self) -> None:
        with self.assertRaises(InputValidationError):
            partial_zeta(2, 0)

    def test_gamma_ratio_examples(self) -> None:
        self.assertEqual(gamma_R_ratio(mp.mpf(3), 0), 1)
        self.assertLess(abs(gamma_R_ratio(1, 1) - 1 / (2 * mp.pi)), mp.mpf(10) ** -30)
        self.assertLess(abs(gamma_R_ratio(0.5, 2) - mp.mpf(0.031663)), 1e-6)

    def test_gamma_ratio_matches_gamma_quotient(self) -> None:
        rng = random.Random(20)
        for _ in range(20):
            s = mp.mpc(rng.uniform(0.1, 6), rng.uniform(-5, 5))
            r = rng.randrange(0, 6)
            expected = gamma_R(s + 2 * r) / gamma_R(s)
            self.assertLess(abs(gamma_R_ratio(s, r) / expected - 1), 1e-12)


if __name__ == "__main__":
    unittest.main()
