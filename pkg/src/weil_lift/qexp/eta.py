"""Dedekind eta: exact expansions, the transformation law and eta quotients."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
import logging
from math import floor, gcd, lcm

import mpmath as mp

from ..exceptions import InputValidationError
from ..numtheory import Matrix2, divisors, mat_mul, translation
from .series import QExpansion, to_mp

LOGGER = logging.getLogger(__name__)

FUNDAMENTAL_STEPS = 10_000


def _require_upper(tau: mp.mpc) -> mp.mpc:
    tau = mp.mpmathify(tau)
    if mp.im(tau) <= 0:
        raise InputValidationError(f"tau={mp.nstr(tau, 8)} is not in the upper half-plane")
    return mp.mpc(tau)


@cache
def _euler_product(order: int) -> tuple[int, ...]:
    """Coefficients of prod_{n >= 1} (1 - q^n) below q^order (pentagonal numbers)."""
    coeffs = [0] * max(order, 0)
    if order > 0:
        coeffs[0] = 1
    m = 1
    while True:
        first = m * (3 * m - 1) // 2
        second = m * (3 * m + 1) // 2
        if first >= order:
            break
        sign = -1 if m % 2 else 1
        coeffs[first] = sign
        if second < order:
            coeffs[second] = sign
        m += 1
    return tuple(coeffs)


def euler_product(order: int, scale: int = 1) -> QExpansion:
    """prod_{n >= 1} (1 - q^(scale n)) below q^order."""
    base = _euler_product((order - 1) // scale + 1 if order > 0 else 0)
    coeffs = [0] * max(order, 0)
    for n, c in enumerate(base):
        if n * scale < order:
            coeffs[n * scale] = c
    return QExpansion(tuple(coeffs), 0, 1, Fraction(0), 1, max(order, 0))


def eta_qexp(order: int) -> QExpansion:
    """eta = q^(1/24) prod (1 - q^n), known below q^(order + 1/24)."""
    return euler_product(order).with_weight(Fraction(1, 2)).shift(Fraction(1, 24))


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) = sum_{r=1}^{k-1} ((r/k)) ((h r/k)) for k >= 1."""
    if k < 1:
        raise InputValidationError(f"Dedekind sums need k >= 1, got {k}")

    def sawtooth(x: Fraction) -> Fraction:
        if x.denominator == 1:
            return Fraction(0)
        return x - floor(x) - Fraction(1, 2)

    return sum((sawtooth(Fraction(r, k)) * sawtooth(Fraction(h * r, k)) for r in range(1, k)), Fraction(0))


def eta_multiplier(gamma: Matrix2) -> Fraction:
    """Exponent e with eta(gamma tau) = exp(pi i e) (-i(c tau + d))^(1/2) eta(tau), for c > 0.

    For c = 0 the law is eta(tau + b) = e(b/24) eta(tau), returned as e = b/12.
    """
    (a, b), (c, d) = gamma
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
    if c == 0:
        return Fraction(b, 12)
    return Fraction(a + d, 12 * c) - dedekind_sum(d, c)


def eta_transform(gamma: Matrix2, tau: mp.mpc) -> mp.mpc:
    """eta(gamma tau) from eta(tau) through the multiplier system."""
    tau = _require_upper(tau)
    (a, b), (c, d) = gamma
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
    e = eta_multiplier(((a, b), (c, d)))
    if c == 0:
        return mp.expjpi(to_mp(e)) * eta(tau)
    return mp.expjpi(to_mp(e)) * mp.sqrt(-1j * (c * tau + d)) * eta(tau)


def eta_series(tau: mp.mpc) -> mp.mpc:
    """eta(tau) straight from the pentagonal series; accurate when Im tau is not small."""
    q = mp.expjpi(2 * tau)
    total = mp.mpc(1)
    eps = mp.eps * 2
    m = 1
    while True:
        first = q ** (m * (3 * m - 1) // 2)
        second = first * q**m
        sign = -1 if m % 2 else 1
        total += sign * (first + second)
        if abs(first) < eps:
            break
        m += 1
    return mp.expjpi(tau / 12) * total


def reduce_to_fundamental_domain(tau: mp.mpc) -> tuple[mp.mpc, Matrix2]:
    """(tau', gamma) with tau' = gamma tau in |Re| <= 1/2, |tau'| >= 1."""
    tau = _require_upper(tau)
    gamma: Matrix2 = ((1, 0), (0, 1))
    for _ in range(FUNDAMENTAL_STEPS):
        n = int(mp.nint(mp.re(tau)))
        if n:
            tau -= n
            gamma = mat_mul(translation(-n), gamma)
        if abs(tau) < 1 - mp.eps * 8:
            tau = -1 / tau
            gamma = mat_mul(((0, -1), (1, 0)), gamma)
            continue
        return tau, gamma
    raise InputValidationError(f"reduction of tau={mp.nstr(tau, 8)} did not terminate")


def eta(tau: mp.mpc) -> mp.mpc:
    """Dedekind eta at any tau in the upper half-plane.

    tau is moved into the standard fundamental domain step by step: eta(tau + n) =
    e(n/24) eta(tau) and eta(tau) = (-i tau)^(-1/2) eta(-1/tau).
    """
    tau = _require_upper(tau)
    with mp.extraprec(20):
        factor = mp.mpc(1)
        for _ in range(FUNDAMENTAL_STEPS):
            n = int(mp.nint(mp.re(tau)))
            if n:
                tau -= n
                factor *= mp.expjpi(mp.mpf(n) / 12)
            if abs(tau) < 1 - mp.eps * 8:
                factor /= mp.sqrt(-1j * tau)
                tau = -1 / tau
                continue
            value = factor * eta_series(tau)
            break
        else:
            raise InputValidationError("eta reduction did not terminate")
    return +value


@dataclass(frozen=True)
class EtaQuotient:
    """prod_d eta(d tau)^(r_d) for a finite map d -> r_d."""

    exponents: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.exponents:
            raise InputValidationError("an eta quotient needs at least one factor")
        for d, _ in self.exponents:
            if d < 1:
                raise InputValidationError(f"eta quotient scales must be positive, got {d}")
        object.__setattr__(self, "exponents", tuple(sorted((d, r) for d, r in self.exponents if r)))

    @classmethod
    def from_mapping(cls, exponents: Mapping[int, int]) -> EtaQuotient:
        return cls(tuple((int(d), int(r)) for d, r in exponents.items()))

    @property
    def level(self) -> int:
        return lcm(*(d for d, _ in self.exponents))

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.exponents), 2)

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(sum(d * r for d, r in self.exponents), 24)

    def as_dict(self) -> dict[str, int]:
        return {str(d): r for d, r in self.exponents}

    def qexp(self, order: int) -> QExpansion:
        """Exact expansion; the product part is known below q^order before the leading shift."""
        product = QExpansion((1,), 0, 1, Fraction(0), 1, order)
        for d, r in self.exponents:
            product = product * euler_product(order, d) ** r
        return product.with_weight(self.weight, self.level).shift(self.leading_exponent)

    def __call__(self, tau: mp.mpc) -> mp.mpc:
        tau = _require_upper(tau)
        with mp.extraprec(10 + 4 * sum(abs(r) for _, r in self.exponents)):
            value = mp.mpc(1)
            for d, r in self.exponents:
                value *= eta(d * tau) ** r
        return +value

    def fricke(self) -> tuple[mp.mpf, EtaQuotient]:
        """(C, g) with f(-1/(N tau)) = C (-i tau)^w g(tau), N the level.

        eta(d (-1/(N tau))) = (-i (N/d) tau)^(1/2) eta((N/d) tau), so g swaps d and N/d.
        """
        N = self.level
        constant = mp.mpf(1)
        for d, r in self.exponents:
            constant *= mp.power(mp.mpf(N) / d, mp.mpf(r) / 2)
        swapped = EtaQuotient(tuple((N // d, r) for d, r in self.exponents))
        return constant, swapped

    def fricke_sign(self) -> int | None:
        """Exact Fricke eigenvalue when the quotient is fixed by d -> N/d, else None.

        The normalization is f(-1/(N tau)) = eps N^(w/2) tau^w f(tau) for integral weight w.
        """
        constant, swapped = self.fricke()
        if swapped != self or self.weight.denominator != 1 or int(self.weight) % 2:
            return None
        w = int(self.weight)
        eps = constant * (-1) ** (w // 2) / mp.power(self.level, w // 2)
        sign = int(mp.nint(eps))
        if sign not in (1, -1) or abs(eps - sign) > mp.mpf(10) ** -10:
            return None
        return sign

    def is_holomorphic_at_infinity(self) -> bool:
        return self.leading_exponent >= 0


def eta_quotient(exponents: Mapping[int, int], order: int) -> QExpansion:
    """Expansion of prod_d eta(d tau)^(r_d); the exponent denominator divides 24."""
    quotient = EtaQuotient.from_mapping(exponents)
    series = quotient.qexp(order)
    LOGGER.debug(
        "qexp.eta_quotient",
        extra={"event": "qexp.eta_quotient", "exponents": quotient.as_dict(), "order": order},
    )
    return series


def order_at_cusp(quotient: EtaQuotient, c: int) -> Fraction:
    """Ligozat order of vanishing at the cusp 1/c (c | N), in the local parameter of that cusp."""
    N = quotient.level
    if N % c:
        raise InputValidationError(f"{c} does not divide the level {N}")
    total = Fraction(0)
    for d, r in quotient.exponents:
        total += Fraction(gcd(d, c) ** 2 * r, d)
    return Fraction(N, 24 * gcd(c, N // c) * c) * total


def is_cusp_form(quotient: EtaQuotient) -> bool:
    return all(order_at_cusp(quotient, c) > 0 for c in divisors(quotient.level))
