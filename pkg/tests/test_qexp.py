"""Tests for q-expansions, eta quotients, standard forms and classical operators."""

from __future__ import annotations

from fractions import Fraction
import json
from pathlib import Path
import tempfile
import unittest

import mpmath as mp

from weil_lift.exceptions import CoefficientShortageError, HeightError, InputValidationError
from weil_lift.qexp import (
    EtaQuotient,
    Newform,
    QExpansion,
    ScaledForm,
    atkin_lehner,
    cohen_operator,
    dedekind_sum,
    delta,
    delta_newform,
    eisenstein,
    eta,
    eta_transform,
    evaluate,
    fricke_eigenvalue,
    gamma0_reduce,
    hauptmodul,
    hauptmodul_function,
    hauptmodul_quotient,
    hecke_T,
    hecke_U,
    hecke_V,
    is_cusp_form,
    j_invariant,
    level3_weight6_newform,
    trace_down,
)
from weil_lift.numtheory import act_on_point


class PrecisionCase(unittest.TestCase):
    def setUp(self) -> None:
        self._prec = mp.mp.prec
        mp.mp.prec = 128

    def tearDown(self) -> None:
        mp.mp.prec = self._prec


class SeriesTests(unittest.TestCase):
    """Exact arithmetic on truncated expansions."""

    def test_truncation_order_is_the_minimum(self) -> None:
        a = QExpansion((1, 2, 3), 0, order=10)
        b = QExpansion((1, 1), 0, order=4)
        self.assertEqual((a + b).order, 4)
        self.assertEqual((a * b).order, 4)

    def test_coefficient_beyond_order_raises(self) -> None:
        series = QExpansion((1, 2, 3), 0)
        self.assertEqual(series.coefficient(2), 3)
        with self.assertRaises(CoefficientShortageError) as ctx:
            series.coefficient(3)
        self.assertEqual(ctx.exception.required, 4)

    def test_inverse_times_series_is_one(self) -> None:
        series = QExpansion((1, -1), 0, order=12)
        product = series * series.inverse()
        self.assertEqual(product, QExpansion.constant(1, 12))

    def test_distributive_law_is_exact(self) -> None:
        a = eisenstein(4, 15)
        b = eisenstein(4, 15).scaled(Fraction(3, 7))
        c = QExpansion((Fraction(1, 2), 5, -3), 0, order=15).with_weight(4)
        self.assertEqual(a * (b + c), a * b + a * c)

    def test_addition_needs_matching_weights(self) -> None:
        with self.assertRaises(InputValidationError):
            eisenstein(4, 5) + eisenstein(6, 5)


class StandardFormTests(unittest.TestCase):
    """Eisenstein series, Delta, j and the hauptmoduls."""

    def test_eisenstein_coefficients(self) -> None:
        self.assertEqual(eisenstein(4, 5).coefficient(1), 240)
        self.assertEqual(eisenstein(6, 5).coefficient(1), -504)
        self.assertEqual(eisenstein(4, 5).coefficient(2), 240 * 9)

    def test_delta_coefficients(self) -> None:
        series = delta(10)
        self.assertEqual([series.coefficient(n) for n in range(1, 7)], [1, -24, 252, -1472, 4830, -6048])
        self.assertEqual(series.coefficient(6), series.coefficient(2) * series.coefficient(3))

    def test_delta_from_eisenstein(self) -> None:
        E4, E6 = eisenstein(4, 20), eisenstein(6, 20)
        self.assertEqual((E4**3 - E6**2).scaled(Fraction(1, 1728)), delta(20))

    def test_j_coefficients(self) -> None:
        j = j_invariant(4)
        self.assertEqual(j.coefficient(-1), 1)
        self.assertEqual(j.coefficient(0), 744)
        self.assertEqual(j.coefficient(1), 196884)
        self.assertEqual(j.coefficient(2), 21493760)

    def test_hauptmodul_of_level_three(self) -> None:
        series = hauptmodul(3, 4)
        self.assertEqual(series.coefficient(-1), 1)
        self.assertEqual(series.coefficient(0), -12)
        self.assertEqual(series.coefficient(1), 54)

    def test_hauptmoduls_start_at_q_inverse(self) -> None:
        for N in (3, 5, 7, 13):
            self.assertEqual(hauptmodul(N, 3).valuation(), -1)

    def test_unsupported_hauptmodul_level(self) -> None:
        with self.assertRaises(InputValidationError):
            hauptmodul(11, 5)


class EtaTests(PrecisionCase):
    """Dedekind eta and its transformation law."""

    def test_value_at_i(self) -> None:
        expected = mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))
        self.assertLess(abs(eta(mp.mpc(0, 1)) - expected), mp.mpf(10) ** -30)

    def test_translation_and_inversion(self) -> None:
        tau = mp.mpc("0.137", "0.521")
        self.assertLess(abs(eta(tau + 1) - mp.expjpi(mp.mpf(1) / 12) * eta(tau)), mp.mpf(10) ** -30)
        self.assertLess(abs(eta(-1 / tau) - mp.sqrt(-1j * tau) * eta(tau)), mp.mpf(10) ** -30)

    def test_general_transformation(self) -> None:
        tau = mp.mpc("0.31", "0.83")
        for gamma in (((2, 1), (5, 3)), ((1, -2), (3, -5)), ((-1, 0), (7, -1))):
            direct = eta(act_on_point(gamma, tau))
            self.assertLess(abs(eta_transform(gamma, tau) - direct), mp.mpf(10) ** -28)

    def test_dedekind_sum(self) -> None:
        self.assertEqual(dedekind_sum(1, 3), Fraction(1, 18))
        self.assertEqual(dedekind_sum(0, 1), 0)

    def test_lower_half_plane_is_rejected(self) -> None:
        with self.assertRaises(InputValidationError):
            eta(mp.mpc(0, -1))

    def test_fricke_sign_of_eta_quotients(self) -> None:
        self.assertEqual(EtaQuotient(((1, 24),)).fricke_sign(), 1)
        self.assertEqual(EtaQuotient(((1, 6), (3, 6))).fricke_sign(), -1)
        self.assertIsNone(hauptmodul_quotient(3).fricke_sign())

    def test_cusp_form_detection(self) -> None:
        self.assertTrue(is_cusp_form(EtaQuotient(((1, 6), (3, 6)))))
        self.assertFalse(is_cusp_form(hauptmodul_quotient(3)))

    def test_hauptmodul_is_invariant(self) -> None:
        function = hauptmodul_function(3)
        tau = mp.mpc("0.2", "0.7")
        for gamma in (((1, 1), (3, 4)), ((2, -1), (-3, 2)), ((4, 1), (15, 4))):
            moved = function(act_on_point(gamma, tau))
            self.assertLess(abs(moved / function(tau) - 1), mp.mpf(10) ** -25)

    def test_j_at_i(self) -> None:
        self.assertLess(abs(hauptmodul_function(1)(mp.mpc(0, 1)) - 1728), mp.mpf(10) ** -25)

    def test_atkin_lehner_swaps_exponents(self) -> None:
        self.assertEqual(atkin_lehner(hauptmodul_quotient(3), 3), EtaQuotient(((3, 12), (1, -12))))
        quotient = EtaQuotient(((1, 6), (3, 6)))
        self.assertEqual(atkin_lehner(quotient, 3), quotient)


class NewformTests(unittest.TestCase):
    """Newform records, recurrences and file input."""

    def test_multiplicative_extension(self) -> None:
        form = delta_newform(bound=10)
        self.assertEqual(form.coefficient(12), -370944)
        self.assertEqual(form.coefficient(16), 987136)
        with self.assertRaises(CoefficientShortageError):
            form.coefficient(11)

    def test_builtin_forms_satisfy_recurrences(self) -> None:
        delta_newform(bound=200).validate()
        form = level3_weight6_newform(bound=200)
        form.validate()
        self.assertEqual(form.coeffs[:6], (1, -6, 9, 4, 6, -54))
        self.assertEqual(form.fricke, -1)

    def test_from_json(self) -> None:
        source = level3_weight6_newform(bound=30)
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "level3.json"
            path.write_text(json.dumps(source.as_dict()), encoding="utf-8")
            loaded = Newform.from_json(path)
        self.assertEqual(loaded.coeffs, source.coeffs)
        self.assertEqual(loaded.eta_exponents, ((1, 6), (3, 6)))
        self.assertEqual(loaded.label, "level3")

    def test_inconsistent_coefficients_are_rejected(self) -> None:
        data = {"level": 1, "weight": 12, "coeffs": [1, -24, 252, -1472, 4830, 6048], "fricke": 1}
        with self.assertRaises(InputValidationError):
            Newform.from_dict(data)

    def test_unnormalized_form_is_rejected(self) -> None:
        with self.assertRaises(InputValidationError):
            Newform(1, 12, (2, -48))


class EvaluationTests(PrecisionCase):
    """Gamma_0(N)-aware evaluation and Fricke signs."""

    def test_delta_series_matches_eta(self) -> None:
        value = evaluate(delta(60), mp.mpc(0, 1))
        self.assertLess(abs(value.value / eta(mp.mpc(0, 1)) ** 24 - 1), mp.mpf(10) ** -25)

    def test_high_point_needs_no_reduction(self) -> None:
        series = delta(20)
        tau = mp.mpc("0.3", "10")
        result = evaluate(series, tau)
        self.assertEqual(result.matrix, ((1, 0), (0, 1)))
        direct = series.evaluate_q(mp.expjpi(2 * tau))
        self.assertLess(abs(result.value - direct), abs(direct) * mp.mpf(10) ** -30)

    def test_modularity_of_series_evaluation(self) -> None:
        form = level3_weight6_newform(bound=80)
        plain = Newform(form.level, form.weight, form.coeffs)
        tau = mp.mpc("0.1", "0.9")
        base = evaluate(plain, tau).value
        for (a, b), (c, d) in (((1, 0), (3, 1)), ((2, 1), (3, 2)), ((1, -1), (-6, 7))):
            moved = evaluate(plain, act_on_point(((a, b), (c, d)), tau)).value
            self.assertLess(abs(moved - (c * tau + d) ** 6 * base), abs(moved) * mp.mpf(10) ** -15)

    def test_gamma0_reduce_reaches_height(self) -> None:
        point, gamma = gamma0_reduce(mp.mpc("0.33", "0.01"), 1)
        self.assertGreaterEqual(mp.im(point), mp.sqrt(3) / 2 - mp.mpf(10) ** -20)
        self.assertLessEqual(abs(mp.re(point)), mp.mpf(1) / 2)
        self.assertEqual(gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0], 1)

    def test_height_failure_is_reported(self) -> None:
        form = level3_weight6_newform(bound=40)
        plain = Newform(form.level, form.weight, form.coeffs)
        with self.assertRaises(HeightError) as ctx:
            evaluate(plain, mp.mpc(0, "0.01"))
        self.assertLess(ctx.exception.achieved, 0.4)

    def test_fricke_eigenvalues(self) -> None:
        self.assertEqual(fricke_eigenvalue(delta_newform(bound=40)), 1)
        form = level3_weight6_newform(bound=80)
        self.assertEqual(fricke_eigenvalue(form), -1)
        self.assertEqual(fricke_eigenvalue(Newform(form.level, form.weight, form.coeffs)), -1)


class OperatorTests(PrecisionCase):
    """Hecke, U, V, Cohen and trace operators."""

    def test_delta_is_a_hecke_eigenform(self) -> None:
        self.assertEqual(hecke_T(delta(30), 2), delta(15).scaled(-24))
        self.assertEqual(hecke_T(delta(31), 3), delta(11).scaled(252))

    def test_hecke_operators_commute(self) -> None:
        E4 = eisenstein(4, 61)
        self.assertEqual(hecke_T(hecke_T(E4, 2), 3), hecke_T(hecke_T(E4, 3), 2))

    def test_hecke_needs_coprime_index(self) -> None:
        with self.assertRaises(InputValidationError):
            hecke_T(level3_weight6_newform(bound=20).qexp(), 3)

    def test_u_after_v_is_identity(self) -> None:
        series = delta(20)
        self.assertEqual(hecke_U(hecke_V(series, 3), 3), series)

    def test_v_after_u_keeps_multiples(self) -> None:
        series = delta(21)
        picked = hecke_V(hecke_U(series, 3), 3)
        for n in range(1, 21):
            expected = series.coefficient(n) if n % 3 == 0 else 0
            self.assertEqual(picked.coefficient(n), expected)

    def test_cohen_bracket_of_eisenstein_series(self) -> None:
        E4, E6 = eisenstein(4, 20), eisenstein(6, 20)
        bracket = cohen_operator(E4, E6, 1)
        self.assertEqual(bracket, delta(20).scaled(3456))
        self.assertEqual(bracket.weight, 12)
        self.assertEqual(cohen_operator(E4, E6, 0), E4 * E6)
        self.assertEqual(cohen_operator(E4, E6, 2).coefficient(0), 0)

    def test_trace_to_same_level_is_identity(self) -> None:
        result = trace_down(level3_weight6_newform(bound=20), 3, order=4)
        for n, expected in enumerate((0, 1, -6, 9)):
            self.assertLess(abs(result.series.coefficient(n) - expected), mp.mpf(10) ** -12)

    def test_newform_traces_to_zero(self) -> None:
        result = trace_down(level3_weight6_newform(bound=20), 1, order=4)
        for n in range(4):
            self.assertLess(abs(result.series.coefficient(n)), mp.mpf(10) ** -12)

    def test_trace_of_scaled_form_is_hecke_image(self) -> None:
        result = trace_down(ScaledForm(delta_newform(bound=20), 2), 1, order=4)
        factor = Fraction(-24, 2**11)
        for n, tau_n in enumerate((0, 1, -24, 252)):
            value = factor * tau_n
            expected = mp.mpf(value.numerator) / value.denominator
            self.assertLess(abs(result.series.coefficient(n) - expected), mp.mpf(10) ** -12)


if __name__ == "__main__":
    unittest.main()
