"""Tests for binary quadratic forms, class groups and Heegner points."""

from __future__ import annotations

from itertools import product
import unittest

from weil_lift.bqf import (
    BQF,
    class_group,
    class_number,
    compose,
    gamma0_automorph,
    gamma0_classes,
    galois_conjugate,
    genus_char,
    genus_char_prime,
    heegner_class,
    heegner_points,
    indefinite_classes,
    is_reduced,
    pell_automorph,
    pell_solution,
    reduce,
    reduced_cycle,
    reduced_forms,
    root_orbits,
)
from weil_lift.exceptions import ClassEnumerationError, InputValidationError
from weil_lift.numtheory import IDENTITY, is_fundamental, mat_det


class ReductionTests(unittest.TestCase):
    """Definite reduction and class groups."""

    def test_reduce_examples(self) -> None:
        form, gamma = reduce(BQF(1, 1, 1))
        self.assertEqual(form, BQF(1, 1, 1))
        self.assertEqual(gamma, IDENTITY)
        form, gamma = reduce(BQF(6, 1, 1))
        self.assertEqual(form, BQF(1, 1, 6))
        self.assertEqual(BQF(6, 1, 1).act(gamma), form)

    def test_opposite_class_stays_reduced(self) -> None:
        form, _ = reduce(BQF(2, -1, 3))
        self.assertEqual(form, BQF(2, -1, 3))
        self.assertTrue(is_reduced(form))

    def test_reduction_transform_is_unimodular(self) -> None:
        for f in (BQF(13, 11, 3), BQF(100, 87, 19), BQF(5, -9, 7)):
            g, gamma = reduce(f)
            self.assertEqual(mat_det(gamma), 1)
            self.assertEqual(f.act(gamma), g)
            self.assertTrue(is_reduced(g))

    def test_indefinite_input_is_rejected(self) -> None:
        with self.assertRaises(InputValidationError):
            reduce(BQF(1, 1, -1))

    def test_class_group_examples(self) -> None:
        self.assertEqual(class_group(-3).forms, (BQF(1, 1, 1),))
        self.assertEqual(class_group(-4).forms, (BQF(1, 0, 1),))
        self.assertEqual(set(class_group(-23).forms), {BQF(1, 1, 6), BQF(2, 1, 3), BQF(2, -1, 3)})
        for D, h in ((-47, 5), (-71, 7), (-84, 4), (-104, 6)):
            self.assertEqual(class_number(D), h)
        with self.assertRaises(InputValidationError):
            class_group(-12)

    def test_composition_table_is_an_abelian_group(self) -> None:
        for D in range(-3, -201, -1):
            if not is_fundamental(D):
                continue
            group = class_group(D)
            self.assertEqual(group.order, len(reduced_forms(D)))
            e = group.identity
            for f in group.forms:
                self.assertEqual(group.multiply(e, f), f)
                self.assertEqual(group.multiply(f, group.inverse(f)), e)
            for f, g in product(group.forms, repeat=2):
                self.assertEqual(group.multiply(f, g), group.multiply(g, f))
            if group.order <= 8:
                for f, g, h in product(group.forms, repeat=3):
                    self.assertEqual(
                        group.multiply(group.multiply(f, g), h),
                        group.multiply(f, group.multiply(g, h)),
                    )

    def test_compose_rejects_mixed_discriminants(self) -> None:
        with self.assertRaises(InputValidationError):
            compose(BQF(1, 1, 1), BQF(1, 0, 1))


class GenusCharacterTests(unittest.TestCase):
    """Generalised genus characters."""

    def test_examples(self) -> None:
        self.assertEqual(genus_char(1, BQF(2, 1, 3)), 1)
        self.assertEqual(genus_char(-7, BQF(1, 1, 2)), 1)
        self.assertEqual(genus_char(-7, BQF(2, 1, 1)), 1)
        self.assertEqual(genus_char(-3, BQF(3, 0, 3)), 0)

    def test_divisibility_is_required(self) -> None:
        with self.assertRaises(InputValidationError):
            genus_char(-7, BQF(1, 1, 1))

    def test_class_invariance_and_multiplicativity(self) -> None:
        for D, delta in ((-84, -3), (-84, -4), (-84, -7), (-20, -4), (-20, 5), (-56, -7)):
            group = class_group(D)
            values = {f: genus_char(delta, f) for f in group.forms}
            moved = ((2, 1), (1, 1))
            for f in group.forms:
                self.assertEqual(genus_char(delta, f.act(moved)), values[f])
            for f, g in product(group.forms, repeat=2):
                self.assertEqual(values[group.multiply(f, g)], values[f] * values[g])

    def test_prime_discriminant_characters(self) -> None:
        f = BQF(2, 2, 11)
        self.assertEqual(f.disc, -84)
        self.assertEqual(genus_char_prime(3, f), genus_char(-3, f))
        self.assertEqual(genus_char_prime(7, f), genus_char(-7, f))
        with self.assertRaises(InputValidationError):
            genus_char_prime(2, f)


class HeegnerPointTests(unittest.TestCase):
    """Heegner points and the class-group action on them."""

    def test_counts_and_levels(self) -> None:
        self.assertEqual(len(heegner_points(-3, 1)), 1)
        self.assertEqual(len(heegner_points(-23, 1)), 3)
        points = heegner_points(-11, 3)
        self.assertEqual(len(points), 1)
        self.assertEqual(points[0].form.a % 3, 0)
        self.assertGreater(points[0].tau.imag, 0)

    def test_heegner_condition_is_enforced(self) -> None:
        with self.assertRaises(InputValidationError):
            heegner_points(-7, 3)

    def test_galois_action(self) -> None:
        principal = heegner_points(-23, 1)[0]
        sigma = BQF(2, 1, 3)
        self.assertEqual(heegner_class(galois_conjugate(principal, BQF(1, 1, 6))), heegner_class(principal))
        self.assertEqual(heegner_class(galois_conjugate(principal, sigma)), BQF(2, -1, 3))
        group = class_group(-23)
        twice = galois_conjugate(galois_conjugate(principal, sigma), sigma)
        self.assertEqual(
            heegner_class(twice),
            heegner_class(galois_conjugate(principal, group.multiply(sigma, sigma))),
        )

    def test_galois_action_rejects_other_discriminants(self) -> None:
        principal = heegner_points(-23, 1)[0]
        with self.assertRaises(InputValidationError):
            galois_conjugate(principal, BQF(1, 1, 1))


class IndefiniteFormTests(unittest.TestCase):
    """Indefinite reduction, automorphs and class enumeration."""

    def test_pell_examples(self) -> None:
        self.assertEqual(pell_automorph(BQF(1, 1, -1)), ((2, -1), (-1, 1)))
        self.assertEqual(pell_automorph(BQF(1, 0, -3)), ((2, -3), (-1, 2)))
        self.assertEqual(pell_solution(BQF(1, 1, -1)), (3, 1))

    def test_automorph_fixes_form(self) -> None:
        for f in (BQF(1, 1, -1), BQF(2, 3, -4), BQF(-3, 7, 2), BQF(2, 0, -6)):
            M = pell_automorph(f)
            self.assertEqual(f.act(M), f)
            self.assertEqual(mat_det(M), 1)

    def test_square_discriminant_is_rejected(self) -> None:
        with self.assertRaises(InputValidationError):
            pell_automorph(BQF(0, 3, 1))

    def test_reduced_cycle_closes(self) -> None:
        cycle, automorph = reduced_cycle(BQF(1, 1, -1))
        self.assertGreater(len(cycle), 0)
        self.assertEqual(cycle[0].act(automorph), cycle[0])

    def test_class_enumeration(self) -> None:
        self.assertEqual(len(indefinite_classes(5)), 1)
        self.assertEqual(len(indefinite_classes(12)), 2)
        self.assertEqual(indefinite_classes(9), (BQF(0, 3, 0), BQF(0, 3, 1), BQF(0, 3, 2)))
        with self.assertRaises(ClassEnumerationError):
            indefinite_classes(10**8 + 1)

    def test_gamma0_classes_have_level_divisible_a(self) -> None:
        self.assertEqual(gamma0_classes(5, 1), indefinite_classes(5))
        forms = gamma0_classes(33, 3)
        self.assertGreater(len(forms), 0)
        for f in forms:
            self.assertEqual(f.a % 3, 0)
            self.assertEqual(f.disc, 33)

    def test_automorph_merges_roots_of_imprimitive_forms(self) -> None:
        for Q in (BQF(-3, 3, 3), BQF(-3, 6, 3), BQF(-6, 6, 6), BQF(-3, 12, 3)):
            orbits = root_orbits(Q, 3)
            self.assertEqual(sorted(len(orbit) for orbit in orbits), [2, 2], Q)
            self.assertEqual(sorted(p for orbit in orbits for p in orbit), [(0, 1), (1, 0), (1, 1), (1, 2)])
        self.assertEqual(root_orbits(BQF(-3, 3, 3), 3), [((0, 1), (1, 1)), ((1, 0), (1, 2))])

    def test_level_automorph_is_a_power_of_the_fundamental_one(self) -> None:
        self.assertEqual(pell_automorph(BQF(-3, 3, 3)), ((2, 1), (1, 1)))
        self.assertEqual(gamma0_automorph(BQF(-3, 3, 3), 3), ((5, 3), (3, 2)))
        primitive = BQF(3, 3, -1)
        self.assertEqual(gamma0_automorph(primitive, 3), pell_automorph(primitive))
        self.assertEqual(gamma0_automorph(BQF(-3, 3, 3), 1), ((2, 1), (1, 1)))

    def test_gamma0_classes_take_one_form_per_orbit(self) -> None:
        for D in (45, 72, 180):
            forms = gamma0_classes(D, 3)
            expected = sum(len(root_orbits(Q, 3)) for Q in indefinite_classes(D))
            self.assertEqual(len(forms), expected)
            self.assertEqual(len(set(forms)), len(forms))
            self.assertTrue(all(f.a % 3 == 0 and f.disc == D for f in forms))
        square = gamma0_classes(9, 3)
        self.assertEqual(len(square), sum(len(root_orbits(Q, 3)) for Q in indefinite_classes(9)))


if __name__ == "__main__":
    unittest.main()
