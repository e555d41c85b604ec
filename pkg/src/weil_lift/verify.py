"""Acceptance suite behind ``weillift verify``."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import logging
import time

import mpmath as mp
import numpy as np
from rich.console import Console
from rich.table import Table
from sympy import primerange

from .cmvalues import cm_norm, green_g, green_GN, legendre_Q
from .exceptions import WeilLiftError
from .lfunc import (
    class_number_formula_check,
    completed_Lambda,
    dirichlet_L,
    gamma_p0,
    gamma_p1,
    modular_L,
    modular_Lambda,
    rankin_selberg_L,
    rankin_trace,
)
from .numtheory import chi_on_prime, relative_character
from .qexp import cohen_operator, delta, delta_newform, eisenstein, j_invariant, level3_weight6_newform
from .report import CheckResult, VerifyReport
from .shintani import calibrate_shintani_constant, kohnen_series_check, shintani_coeff_ratio, twisted_trace
from .weil import (
    FiniteQuadraticModule,
    braid_residual,
    construct_phiN,
    fundamental_invariant_uK,
    invariance_residuals,
    isotypic_dimension,
    key2_bruteforce,
    sym2,
)
from .weil.invariants import proportionality_defect, random_vector, uK_prime_discriminant

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Outcome:
    passed: bool
    measured: str = ""
    detail: str = ""


@dataclass(frozen=True)
class Check:
    name: str
    criterion: str
    run: Callable[[bool], Outcome]
    long: bool = False


CHECKS: list[Check] = []


def check(name: str, criterion: str, long: bool = False) -> Callable[[Callable[[bool], Outcome]], Callable[[bool], Outcome]]:
    def register(fn: Callable[[bool], Outcome]) -> Callable[[bool], Outcome]:
        CHECKS.append(Check(name, criterion, fn, long))
        return fn

    return register


def _worst(values: list[mp.mpf]) -> mp.mpf:
    return max(values) if values else mp.mpf(0)


@check("weil-relations", "1")
def _weil_relations(quick: bool) -> Outcome:
    modules = [
        FiniteQuadraticModule.cyclic(3, 1),
        FiniteQuadraticModule.cyclic(3, -1),
        FiniteQuadraticModule.cyclic(5, 1),
        FiniteQuadraticModule.cyclic(7, 2),
        FiniteQuadraticModule.cyclic(11, 1),
        FiniteQuadraticModule.cyclic(13, 1),
        FiniteQuadraticModule.hyperbolic(5),
        FiniteQuadraticModule.hyperbolic(7),
        sym2(3),
        sym2(5),
    ]
    milgram = _worst([abs(abs(A.gauss_sum()) - mp.sqrt(A.order)) for A in modules])
    rng = np.random.default_rng(7)
    braid = _worst([braid_residual(random_vector(A, rng)) for A in modules[: 6 if quick else 9]])
    return Outcome(
        milgram < 1e-10 and braid < 1e-10,
        f"milgram={mp.nstr(milgram, 3)} braid={mp.nstr(braid, 3)}",
    )


@check("isotypic-line", "2")
def _isotypic_line(quick: bool) -> Outcome:
    primes = (3, 5) if quick else (3, 5, 7)
    defects = []
    for p in primes:
        rank, basis = isotypic_dimension(p)
        if rank != 1:
            return Outcome(False, f"rank={rank}", f"p={p}")
        defects.append(proportionality_defect(basis, uK_prime_discriminant(p)))
    failures = [p for p in primes if not key2_bruteforce(p).holds]
    worst = _worst(defects)
    return Outcome(worst < 1e-10 and not failures, f"defect={mp.nstr(worst, 3)}", f"key2 failures: {failures}")


@check("uK-invariance", "3")
def _uK_invariance(quick: bool) -> Outcome:
    worst = mp.mpf(0)
    for disc in (-3, -7, -11, -15):
        residuals = invariance_residuals(fundamental_invariant_uK(disc))
        if residuals["T"] != 0:
            return Outcome(False, f"T={mp.nstr(residuals['T'], 3)}", f"disc={disc}")
        worst = max(worst, residuals["S"])
    return Outcome(worst < 1e-10, f"S={mp.nstr(worst, 3)}")


def _phiN_case(D1: int, D2: int, N: int) -> Outcome:
    construction = construct_phiN(D1, D2, N)
    expected = N**4 * abs(D1) ** 3 * D2 * D2
    if construction.module.order != expected or construction.subgroup.order != construction.expected_h_order:
        return Outcome(False, f"|A|={construction.module.order} |H|={construction.subgroup.order}")
    residuals = invariance_residuals(construction.vector)
    return Outcome(
        residuals["T"] == 0 and residuals["S"] < 1e-9,
        f"S={mp.nstr(residuals['S'], 3)}",
        f"|A|={expected} |H|={construction.subgroup.order}",
    )


@check("phiN-small", "4")
def _phiN_small(quick: bool) -> Outcome:
    outcomes = [_phiN_case(-3, -4, 1), _phiN_case(-7, -4, 1)]
    return Outcome(all(o.passed for o in outcomes), "; ".join(o.measured for o in outcomes))


@check("phiN-level-three", "4", long=True)
def _phiN_level_three(quick: bool) -> Outcome:
    return _phiN_case(-11, -8, 3)


@check("qexp-oracles", "5")
def _qexp_oracles(quick: bool) -> Outcome:
    tau = delta(10)
    j = j_invariant(3)
    bracket = cohen_operator(eisenstein(4, 21), eisenstein(6, 21), 1)
    checks = {
        "tau(2)": tau.coefficient(2) == -24,
        "tau(6)": tau.coefficient(6) == tau.coefficient(2) * tau.coefficient(3),
        "j": (j.coefficient(0), j.coefficient(1)) == (744, 196884),
        "cohen": bracket == delta(21).scaled(3456),
    }
    failed = [name for name, ok in checks.items() if not ok]
    return Outcome(not failed, "exact", f"failed: {failed}" if failed else "")


@check("shintani-hecke", "6")
def _shintani_hecke(quick: bool) -> Outcome:
    G = delta_newform()
    gaps = [abs(shintani_coeff_ratio(G, 1, 9, 1) - 9), abs(shintani_coeff_ratio(G, 1, 45, 5) - 495)]
    if not quick:
        H = level3_weight6_newform()
        a5 = H.coefficient(5)
        gaps.append(abs(shintani_coeff_ratio(H, -4, 175, 7) - (a5 + 25)))
        gaps.append(abs(shintani_coeff_ratio(H, -4, 100, 4) - (a5 - 25)))
    zeros = all(twisted_trace(G, 1, m).value == 0 for m in (2, 3))
    worst = _worst(gaps)
    return Outcome(worst < 1e-5 and zeros, f"gap={mp.nstr(worst, 3)}", "" if zeros else "nonzero trace on m = 2, 3 mod 4")


@check("shintani-constant", "supplement")
def _shintani_constant(quick: bool) -> Outcome:
    G = delta_newform()
    calibrations = [calibrate_shintani_constant(G, 1)]
    if not quick:
        calibrations.append(calibrate_shintani_constant(level3_weight6_newform(), -4))
    expected = modular_Lambda(G, 6).value
    gap = abs(calibrations[0].diagonal.value - expected) / abs(expected)
    mismatched = [c.k for c in calibrations if not c.agrees]
    return Outcome(
        gap < 1e-8 and not mismatched,
        f"t(1)/Lambda-1={mp.nstr(gap, 3)}",
        f"sign mismatch for k in {mismatched}" if mismatched else "",
    )


@check("kohnen-series", "7", long=True)
def _kohnen_series(quick: bool) -> Outcome:
    result = kohnen_series_check(delta_newform(), 1, 1, 6, 4)
    return Outcome(result.holds, f"gap={mp.nstr(result.gap, 3)}", f"bound={mp.nstr(result.bound, 3)}")


@check("rankin-structure", "8")
def _rankin_structure(quick: bool) -> Outcome:
    G = level3_weight6_newform()
    minus = [rankin_selberg_L(G, -11, -8, s).value for s in (0, mp.mpf("0.5"), mp.mpc(1, 1))]
    plus = G.with_fricke(1)
    trace = rankin_trace(plus, -11, -8)
    central = rankin_selberg_L(plus, -11, -8, 0, trace=trace)
    s = mp.mpf("0.5")
    outer = rankin_selberg_L(plus, -11, -8, s, N=177, N3=1, trace=trace)
    inner = rankin_selberg_L(plus, -11, -8, s, N=177, N3=59, trace=trace)
    changed = {name for name in outer.factors if outer.factors[name] != inner.factors[name]}
    ok = (
        all(value == 0 for value in minus)
        and abs(central.value) < 1e-8 + central.error
        and central.factors["gamma_p0"] == 1
        and central.factors["gamma_p1"] == 1
        and changed <= {"gamma_p0", "gamma_p1"}
        and abs(outer.factors["gamma_p0"] - gamma_p0(plus, 59, s)) < 1e-20
        and abs(inner.factors["gamma_p1"] - gamma_p1(plus, 59, s)) < 1e-20
    )
    return Outcome(ok, f"|L(0)|={mp.nstr(abs(central.value), 3)}", f"changed blocks: {sorted(changed)}")


@check("l-machinery", "9")
def _l_machinery(quick: bool) -> Outcome:
    points = [mp.mpf("0.3"), mp.mpc("0.7", "2"), mp.mpc("-1.5", "0.5"), mp.mpc("2.25", "-1"), mp.mpf("5.1")]
    residual = mp.mpf(0)
    for D in (-3, -4, 5, 8, -7):
        for s in points:
            left = completed_Lambda(D, s).value
            right = completed_Lambda(D, 1 - s).value
            residual = max(residual, abs(left - right) / max(abs(left), 1))
    at_one = abs(dirichlet_L(-4, 1).value - mp.pi / 4)
    G = level3_weight6_newform()
    s = mp.mpc("3.2", "1.5")
    base = modular_L(G, s).value
    drift = abs(modular_L(G, s, cutoff=mp.mpf(2)).value - base) / max(abs(base), 1)
    return Outcome(
        residual < 1e-10 and at_one < 1e-10 and drift < 1e-8,
        f"fe={mp.nstr(residual, 3)} L(1)={mp.nstr(at_one, 3)} afe={mp.nstr(drift, 3)}",
    )


@check("cm-norms", "10")
def _cm_norms(quick: bool) -> Outcome:
    first = cm_norm(1, -3, -7, bits=512)
    second = cm_norm(1, -3, -4)
    third = cm_norm(3, -11, -8)
    ok = (
        first.nearest == 3375**4
        and first.factors == {3: 12, 5: 12}
        and first.distance < 1e-20
        and second.nearest == 1728**4
        and abs(third.nearest) > 1
        and not third.is_unit
        and third.distance < 1e-10
    )
    return Outcome(ok, f"N(3,-11,-8)={third.nearest}", f"factors={third.factors}")


@check("green-functions", "11")
def _green_functions(quick: bool) -> Outcome:
    closed = abs(legendre_Q(1, 2) - mp.log(3) / 2)
    z1, z2 = mp.mpc("0.1", "1.1"), mp.mpc("0.3", "0.7")
    base = green_g(3, z1, z2)
    rng = np.random.default_rng(11)
    drift = mp.mpf(0)
    for _ in range(10):
        a, b, c = (mp.mpf(float(x)) for x in rng.uniform(0.5, 2.0, size=3))
        d = (1 + b * c) / a
        moved = green_g(3, (a * z1 + b) / (c * z1 + d), (a * z2 + b) / (c * z2 + d))
        drift = max(drift, abs(moved - base))
    coarse = green_GN(4, 1, z1, z2, cutoff=60 if quick else 100)
    fine = green_GN(4, 1, z1, z2, cutoff=120 if quick else 200)
    stable = abs(fine.value - coarse.value) < coarse.tail + fine.tail
    return Outcome(
        closed < 1e-10 and drift < 1e-10 and stable,
        f"Q0={mp.nstr(closed, 3)} isometry={mp.nstr(drift, 3)} tail={mp.nstr(coarse.tail, 3)}",
    )


@check("class-number-formula", "supplement")
def _class_number_formula(quick: bool) -> Outcome:
    gaps = [class_number_formula_check(D).gap for D in (-3, -4, -23, 5, 13)]
    worst = _worst(gaps)
    return Outcome(worst < 1e-10, f"gap={mp.nstr(worst, 3)}")


@check("hecke-characters", "supplement")
def _hecke_characters(quick: bool) -> Outcome:
    D1, D2 = -3, -4
    bad = [
        p
        for p in primerange(5, 1000)
        if not relative_character(D1, D2, p) == chi_on_prime(D1, D2, p, 1) == chi_on_prime(D1, D2, p, 2)
    ]
    return Outcome(not bad, f"{len(bad)} mismatches")


def run_checks(quick: bool = False, bits: int | None = None, selected: list[str] | None = None) -> VerifyReport:
    """Run the registered checks and collect their outcomes."""
    prec = bits or mp.mp.prec
    results = []
    with mp.workprec(prec):
        for entry in CHECKS:
            if selected and entry.name not in selected:
                continue
            if quick and entry.long:
                results.append(CheckResult(name=entry.name, criterion=entry.criterion, passed=False, skipped=True))
                continue
            started = time.perf_counter()
            try:
                outcome = entry.run(quick)
            except WeilLiftError as exc:
                outcome = Outcome(False, "", f"{type(exc).__name__}: {exc}")
            elapsed = time.perf_counter() - started
            LOGGER.info(
                "verify.check",
                extra={"event": "verify.check", "name": entry.name, "passed": outcome.passed, "elapsed": round(elapsed, 3)},
            )
            results.append(
                CheckResult(
                    name=entry.name,
                    criterion=entry.criterion,
                    passed=outcome.passed,
                    measured=outcome.measured,
                    detail=outcome.detail,
                    elapsed=elapsed,
                )
            )
    return VerifyReport(quick=quick, bits=prec, checks=results)


def render(report: VerifyReport, console: Console | None = None) -> None:
    """Print the pass/fail table."""
    console = console or Console(stderr=True)
    table = Table(title=f"weillift verify ({report.bits} bits{', quick' if report.quick else ''})")
    table.add_column("check")
    table.add_column("criterion", justify="right")
    table.add_column("result")
    table.add_column("measured")
    table.add_column("seconds", justify="right")
    for result in report.checks:
        if result.skipped:
            status = "[yellow]skipped[/yellow]"
        elif result.passed:
            status = "[green]pass[/green]"
        else:
            status = "[red]FAIL[/red]"
        table.add_row(result.name, result.criterion, status, result.measured or result.detail, f"{result.elapsed:.2f}")
    console.print(table)
