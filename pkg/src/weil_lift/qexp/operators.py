"""Hecke, U, V, Atkin-Lehner, trace and Cohen operators on q-expansions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging
from math import comb, gcd, lcm
from typing import Any

import mpmath as mp

from ..exceptions import InputValidationError, PrecisionError
from ..numtheory import IDENTITY, complete_sl2, divisors, is_squarefree, lift_coprime, p1_points, psi_index
from .eta import EtaQuotient
from .evaluate import evaluate
from .series import QExpansion, to_mp

LOGGER = logging.getLogger(__name__)


def _integral(f: QExpansion, name: str) -> None:
    if f.den != 1:
        raise InputValidationError(f"{name} needs integral exponents, the series has denominator {f.den}")


def hecke_T(f: QExpansion, m: int) -> QExpansion:
    """T_m with a_n -> sum_{d | (m, n)} d^(w-1) a_(mn/d^2), m coprime to the level."""
    _integral(f, "T_m")
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    if gcd(m, f.level) != 1:
        raise InputValidationError(f"T_{m} needs m coprime to the level {f.level}")
    if f.weight.denominator != 1:
        raise InputValidationError("T_m is implemented for integral weight only")
    w = int(f.weight)
    start = f.start * m if f.start < 0 else -((-f.start) // m)
    order = (f.order - 1) // m + 1
    values = []
    for n in range(start, order):
        total: Any = 0
        for d in divisors(gcd(m, abs(n)) if n else m):
            factor = Fraction(d) ** (w - 1)
            coeff = f.coefficient(Fraction(m * n, d * d))
            total += factor * coeff if isinstance(coeff, Fraction) else to_mp(factor) * coeff
        values.append(total)
    return QExpansion(tuple(values), start, 1, f.weight, f.level, max(order, start))


def hecke_U(f: QExpansion, m: int) -> QExpansion:
    """U_m: a_n -> a_(mn) on the exponent lattice of f."""
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    start = -((-f.start) // m)
    order = (f.order - 1) // m + 1
    values = [f.coefficient(Fraction(m * n, f.den)) for n in range(start, order)]
    return QExpansion(tuple(values), start, f.den, f.weight, lcm(f.level, m), max(order, start))


def hecke_V(f: QExpansion, m: int) -> QExpansion:
    """V_m f(z) = f(mz): a_n -> a_(n/m)."""
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    zero = Fraction(0) if f.is_exact else mp.mpf(0)
    values = [zero] * ((f.order - f.start) * m)
    for i, c in enumerate(f.coeffs):
        values[i * m] = c
    return QExpansion(tuple(values), f.start * m, f.den, f.weight, f.level * m, f.order * m)


def _binomial(x: Fraction, n: int) -> Fraction:
    if x.denominator == 1 and x >= 0:
        return Fraction(comb(int(x), n))
    result = Fraction(1)
    for i in range(n):
        result *= (x - i) / (i + 1)
    return result


def cohen_operator(f: QExpansion, g: QExpansion, r: int) -> QExpansion:
    """r-th Cohen bracket sum_s (-1)^s C(k1+r-1, s) C(k2+r-1, r-s) D^(r-s) f D^s g, D = q d/dq."""
    if r < 0:
        raise InputValidationError(f"r must be nonnegative, got {r}")
    k1, k2 = f.weight, g.weight
    derivatives_f = [f]
    derivatives_g = [g]
    for _ in range(r):
        derivatives_f.append(derivatives_f[-1].derivative())
        derivatives_g.append(derivatives_g[-1].derivative())
    terms = []
    for s in range(r + 1):
        factor = (-1) ** s * _binomial(k1 + r - 1, s) * _binomial(k2 + r - 1, r - s)
        terms.append((derivatives_f[r - s] * derivatives_g[s]).scaled(factor))
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    LOGGER.debug(
        "qexp.cohen",
        extra={"event": "qexp.cohen", "r": r, "weight": str(total.weight)},
    )
    return total


def atkin_lehner(quotient: EtaQuotient, Q: int) -> EtaQuotient:
    """Exponents of f|W_Q for an eta quotient of squarefree level: eta(dz) -> eta(d Q/(d,Q)^2 z)."""
    N = quotient.level
    if N % Q or gcd(Q, N // Q) != 1:
        raise InputValidationError(f"{Q} is not an exact divisor of the level {N}")
    swapped: dict[int, int] = {}
    for d, r in quotient.exponents:
        image = d * Q // gcd(d, Q) ** 2
        swapped[image] = swapped.get(image, 0) + r
    return EtaQuotient.from_mapping(swapped)


@dataclass(frozen=True)
class ScaledForm:
    """z -> f(scale z) for an evaluable f; the V operator as a function."""

    base: Any
    scale: int

    def __post_init__(self) -> None:
        if self.scale < 1:
            raise InputValidationError(f"scale must be positive, got {self.scale}")

    @property
    def weight(self) -> Fraction:
        return Fraction(self.base.weight)

    @property
    def level(self) -> int:
        return self.base.level * self.scale

    @property
    def eta_quotient(self) -> EtaQuotient | None:
        quotient = self.base if isinstance(self.base, EtaQuotient) else getattr(self.base, "eta_quotient", None)
        if quotient is None:
            return None
        return EtaQuotient(tuple((d * self.scale, r) for d, r in quotient.exponents))

    def qexp(self, order: int | None = None) -> QExpansion:
        base = self.base if isinstance(self.base, QExpansion) else self.base.qexp(order)
        return hecke_V(base, self.scale)

    def __call__(self, tau: mp.mpc) -> mp.mpc:
        quotient = self.eta_quotient
        if quotient is not None:
            return quotient(tau)
        return evaluate(self.base, self.scale * mp.mpc(tau)).value


@dataclass(frozen=True)
class TraceResult:
    """Coefficients of the trace with the largest disagreement between two sampling heights."""

    series: QExpansion
    error: mp.mpf


def trace_cosets(N: int, N_prime: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Representatives of Gamma_0(N) backslash Gamma_0(N'), one per point (c:d) of P^1(Z/N) with N' | c."""
    reps = []
    for c, d in p1_points(N):
        if N == 1 or c == 0:
            reps.append(IDENTITY)
            continue
        if c % N_prime:
            continue
        lc, ld = lift_coprime(c, d, N)
        reps.append(complete_sl2(lc, ld))
    return reps


def _slash_sum(f: Any, cosets: list, w: int, tau: mp.mpc) -> mp.mpc:
    total = mp.mpc(0)
    for (a, b), (c, d) in cosets:
        image = (a * tau + b) / (c * tau + d)
        total += mp.power(c * tau + d, -w) * f(image)
    return total


def _sampled_coefficients(values: list[mp.mpc], height: mp.mpf, order: int) -> list[mp.mpc]:
    M = len(values)
    out = []
    for n in range(order):
        acc = mp.fsum(v * mp.expjpi(-2 * mp.mpf(n * j) / M) for j, v in enumerate(values))
        out.append(acc / M * mp.exp(2 * mp.pi * n * height))
    return out


def trace_down(
    f: Any,
    N_prime: int,
    order: int = 10,
    samples: int | None = None,
    heights: tuple[float, float] = (0.55, 0.7),
    tolerance: float | None = None,
) -> TraceResult:
    """Tr^N_{N'} f = sum over Gamma_0(N) backslash Gamma_0(N') of f|gamma, re-expanded numerically.

    f|gamma (tau) = (c tau + d)^(-w) f(gamma tau); the coefficients b_0 .. b_(order-1)
    come from a discrete Fourier transform over ``samples`` points on each of two
    horizontal lines.
    """
    N = f.level
    weight = Fraction(f.weight)
    if weight.denominator != 1:
        raise InputValidationError("trace_down needs integral weight")
    if not is_squarefree(N):
        raise InputValidationError(f"level {N} must be squarefree")
    if N % N_prime:
        raise InputValidationError(f"{N_prime} does not divide the level {N}")
    w = int(weight)
    M = samples or max(32, 4 * order)
    cosets = trace_cosets(N, N_prime)
    if len(cosets) != psi_index(N) // psi_index(N_prime):
        raise PrecisionError(f"found {len(cosets)} cosets, expected {psi_index(N) // psi_index(N_prime)}")
    estimates = []
    for y in heights:
        height = mp.mpf(y)
        values = [_slash_sum(f, cosets, w, mp.mpc(mp.mpf(j) / M, height)) for j in range(M)]
        estimates.append(_sampled_coefficients(values, height, order))
    first, second = estimates
    error = max((abs(a - b) for a, b in zip(first, second)), default=mp.mpf(0))
    scale = max((abs(b) for b in second), default=mp.mpf(0))
    limit = mp.mpf(tolerance) if tolerance is not None else mp.mpf(10) ** -8
    if error > limit * max(scale, mp.mpf(1)):
        raise PrecisionError(f"trace coefficients disagree between sampling heights by {mp.nstr(error, 5)}")
    series = QExpansion(tuple(second), 0, 1, weight, N_prime, order)
    LOGGER.debug(
        "qexp.trace",
        extra={"event": "qexp.trace", "from": N, "to": N_prime, "cosets": len(cosets), "error": mp.nstr(error, 5)},
    )
    return TraceResult(series, error)
