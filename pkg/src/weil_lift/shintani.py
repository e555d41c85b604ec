"""Geodesic cycle integrals, twisted traces and Shintani-lift coefficients."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
import logging
from typing import Any

import mpmath as mp

from .bqf import BQF, gamma0_automorph, gamma0_classes, genus_char
from .exceptions import InputValidationError, PrecisionError
from .numtheory import act_on_point, is_fundamental, is_square
from .quadrature import adaptive_integrate, integrate_until_decay
from .qexp.evaluate import evaluate
from .qexp.series import QExpansion
from .workers import ordered_map

LOGGER = logging.getLogger(__name__)

DEFAULT_ORDER = 32
DEFAULT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CycleIntegral:
    """Integral of G(z) Q(z, 1)^(k-1) dz over the closed geodesic (or the infinite one) of Q."""

    form: BQF
    level: int
    value: mp.mpc
    error: mp.mpf


@dataclass(frozen=True)
class ShintaniCoefficient:
    """Twisted trace t(m) for the twist ``twist``; proportional to the lift's m-th coefficient."""

    index: int
    twist: int
    value: mp.mpc
    error: mp.mpf
    classes: int = 0

    def as_dict(self, digits: int = 20) -> dict[str, Any]:
        return {
            "m": self.index,
            "twist": self.twist,
            "value_re": mp.nstr(mp.re(self.value), digits),
            "value_im": mp.nstr(mp.im(self.value), digits),
            "error": mp.nstr(self.error, 5),
            "classes": self.classes,
        }


def _as_function(G: Any) -> Callable[[mp.mpc], mp.mpc]:
    if isinstance(G, QExpansion):
        return lambda z: evaluate(G, z).value
    if callable(G):
        return G
    raise InputValidationError(f"cannot evaluate {type(G).__name__} as a modular form")


def _half_weight(G: Any) -> int:
    weight = Fraction(G.weight)
    if weight.denominator != 1 or int(weight) % 2 or weight < 2:
        raise InputValidationError(f"cycle integrals need an even weight 2k >= 2, got {weight}")
    return int(weight) // 2


def _geodesic(Q: BQF) -> tuple[mp.mpf, mp.mpf]:
    """(x0, r) with the geodesic z(s) = x0 + r tanh s + i |r| sech s running from w_- to w_+."""
    root = mp.sqrt(Q.disc)
    return mp.mpf(-Q.b) / (2 * Q.a), root / (2 * Q.a)


def cycle_integral(
    G: Any,
    Q: BQF,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
    max_depth: int = 24,
) -> CycleIntegral:
    """Integral of G(z) Q(z, 1)^(k-1) dz along the cycle of Q, G of weight 2k.

    Non-square discriminant: from the apex z0 of the geodesic to M z0, M the least
    power of the fundamental automorph of Q in Gamma_0(level), which moves points
    towards the root w_-.  Square discriminant: the whole geodesic, oriented from
    w_+ to w_- (for a = 0 the vertical line above -c/b, upwards when b > 0).
    """
    D = Q.disc
    if D <= 0:
        raise InputValidationError(f"cycle integrals need a positive discriminant, got {D} for {Q}")
    k = _half_weight(G)
    level = int(G.level)
    if Q.a % level:
        raise InputValidationError(f"{Q} does not have {level} | a")
    f = _as_function(G)

    if Q.a == 0:
        x = mp.mpf(-Q.c) / Q.b

        def vertical(s: mp.mpf) -> mp.mpc:
            height = mp.exp(s)
            z = mp.mpc(x, height)
            return f(z) * Q.value_at(z) ** (k - 1) * mp.mpc(0, height)

        upper = integrate_until_decay(vertical, 0, 1, 1, order, tolerance, max_depth)
        lower = integrate_until_decay(vertical, 0, -1, 1, order, tolerance, max_depth)
        value = upper.value + lower.value
        error = upper.error + lower.error
        if Q.b < 0:
            value = -value
        return _finish(Q, level, value, error)

    x0, r = _geodesic(Q)
    size = abs(r)

    def along(s: mp.mpf) -> mp.mpc:
        sech = 1 / mp.cosh(s)
        tanh = mp.tanh(s)
        z = mp.mpc(x0 + r * tanh, size * sech)
        dz = mp.mpc(r * sech * sech, -size * sech * tanh)
        return f(z) * Q.value_at(z) ** (k - 1) * dz

    if is_square(D):
        forward = integrate_until_decay(along, 0, 1, 1, order, tolerance, max_depth)
        backward = integrate_until_decay(along, 0, -1, 1, order, tolerance, max_depth)
        return _finish(Q, level, -(forward.value + backward.value), forward.error + backward.error)

    M = gamma0_automorph(Q, level)
    image = act_on_point(M, mp.mpc(x0, size))
    sign = 1 if r > 0 else -1
    end = mp.asinh(sign * (mp.re(image) - x0) / mp.im(image))
    result = adaptive_integrate(along, 0, end, order, tolerance, max_depth)
    return _finish(Q, level, result.value, result.error)


def _finish(Q: BQF, level: int, value: mp.mpc, error: mp.mpf) -> CycleIntegral:
    LOGGER.debug(
        "shintani.cycle_integral",
        extra={"event": "shintani.cycle_integral", "form": str(Q), "error": mp.nstr(error, 5)},
    )
    return CycleIntegral(Q, level, value, error)


def _check_twist(k: int, delta: int) -> None:
    if not is_fundamental(delta):
        raise InputValidationError(f"{delta} is not a fundamental discriminant")
    if (-1) ** k * delta <= 0:
        raise InputValidationError(f"the twist must satisfy (-1)^k * Delta > 0, got k={k}, Delta={delta}")


def _weighted_integral(
    G0: Any, order: int, tolerance: float, item: tuple[BQF, int]
) -> tuple[mp.mpc, mp.mpf]:
    result = cycle_integral(G0, item[0], order, tolerance)
    return item[1] * result.value, result.error


def twisted_trace(
    G0: Any,
    delta: int,
    m: int,
    parity: int | None = None,
    threads: int = 1,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ShintaniCoefficient:
    """t(m) = (-1)^(k-1) |Delta|^((1-k)/2) sum_Q chi_Delta(Q) I(Q).

    Q runs over the Gamma_0(N)-classes of forms [A, B, C] with N | A and
    discriminant |Delta| m; ``parity`` keeps only the forms with B of that parity.
    """
    k = _half_weight(G0)
    _check_twist(k, delta)
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    if parity not in (None, 0, 1):
        raise InputValidationError(f"parity must be 0, 1 or None, got {parity}")
    zero = ShintaniCoefficient(m, delta, mp.mpc(0), mp.mpf(0), 0)
    if ((-1) ** k * m) % 4 not in (0, 1):
        return zero
    D = abs(delta) * m
    level = int(G0.level)
    forms = [Q for Q in gamma0_classes(D, level) if parity is None or Q.b % 2 == parity]
    weighted = [(Q, genus_char(delta, Q)) for Q in forms]
    weighted = [(Q, chi) for Q, chi in weighted if chi]
    LOGGER.debug(
        "shintani.classes",
        extra={"event": "shintani.classes", "disc": D, "level": level, "count": len(weighted)},
    )
    if not weighted:
        return zero

    parts = ordered_map(partial(_weighted_integral, G0, order, tolerance), weighted, threads)
    scale = (-1) ** (k - 1) * mp.power(abs(delta), mp.mpf(1 - k) / 2)
    total = mp.fsum(value for value, _ in parts)
    error = mp.fsum(err for _, err in parts)
    return ShintaniCoefficient(m, delta, scale * total, abs(scale) * error, len(weighted))


def _trace_at(
    G0: Any, delta: int, parity: int | None, order: int, tolerance: float, m: int
) -> ShintaniCoefficient:
    return twisted_trace(G0, delta, m, parity, 1, order, tolerance)


def shintani_coefficients(
    G0: Any,
    delta: int,
    ms: Iterable[int],
    threads: int = 1,
    parity: int | None = None,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[ShintaniCoefficient]:
    """t(m) for every m, in input order; the pool runs over the indices."""
    indices = list(ms)
    return ordered_map(partial(_trace_at, G0, delta, parity, order, tolerance), indices, threads)


def _checked_ratio(top: ShintaniCoefficient, bottom: ShintaniCoefficient) -> mp.mpc:
    if abs(bottom.value) <= 10 * bottom.error or bottom.value == 0:
        raise PrecisionError(
            f"t({bottom.index}) = {mp.nstr(bottom.value, 8)} is indistinguishable from 0 "
            f"(error {mp.nstr(bottom.error, 5)})"
        )
    return top.value / bottom.value


def shintani_coeff_ratio(
    G0: Any,
    delta: int,
    m1: int,
    m2: int,
    threads: int = 1,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
) -> mp.mpc:
    """c(m1)/c(m2) for the Shintani lift, as the ratio of two twisted traces."""
    top, bottom = shintani_coefficients(G0, delta, (m1, m2), threads, order=order, tolerance=tolerance)
    return _checked_ratio(top, bottom)


def shintani_constant(k: int) -> Fraction:
    """2^(-k) (-1)^(k-1+floor(k/2)) / 6, the prefactor relating traces and plus-space coefficients.

    Its sign is checked against ``calibrate_shintani_constant``; for Delta and the
    trivial twist t(1) equals Lambda(Delta, 6) = 5! (2 pi)^(-6) L(Delta, 6) > 0.
    """
    return Fraction((-1) ** (k - 1 + k // 2), 6 * 2**k)


@dataclass(frozen=True)
class ShintaniCalibration:
    """The diagonal trace t_Delta(|Delta|), the sign it measures and the recorded constant."""

    k: int
    twist: int
    diagonal: ShintaniCoefficient
    measured_sign: int
    pinned: Fraction

    @property
    def agrees(self) -> bool:
        return self.measured_sign * self.pinned > 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "twist": self.twist,
            "diagonal": self.diagonal.as_dict(),
            "measured_sign": self.measured_sign,
            "pinned": str(self.pinned),
            "agrees": self.agrees,
        }


def calibrate_shintani_constant(
    G0: Any,
    delta: int,
    threads: int = 1,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ShintaniCalibration:
    """Measure the sign of the Shintani constant from t_Delta(|Delta|).

    The diagonal trace is the constant times a Petersson-norm ratio times
    |c(|Delta|)|^2, so it is real and carries the constant's sign.
    """
    k = _half_weight(G0)
    diagonal = twisted_trace(G0, delta, abs(delta), threads=threads, order=order, tolerance=tolerance)
    value = diagonal.value
    if abs(value) <= 10 * diagonal.error or value == 0:
        raise PrecisionError(
            f"t_{delta}({abs(delta)}) = {mp.nstr(value, 8)} is indistinguishable from 0 "
            f"(error {mp.nstr(diagonal.error, 5)})"
        )
    if abs(mp.im(value)) > max(10 * diagonal.error, mp.mpf(10) ** -8 * abs(value)):
        raise PrecisionError(f"t_{delta}({abs(delta)}) = {mp.nstr(value, 8)} is not real")
    sign = 1 if mp.re(value) > 0 else -1
    calibration = ShintaniCalibration(k, delta, diagonal, sign, shintani_constant(k))
    LOGGER.info(
        "shintani.calibration",
        extra={"event": "shintani.calibration", "k": k, "twist": delta, "sign": sign, "agrees": calibration.agrees},
    )
    return calibration


@dataclass(frozen=True)
class KohnenCheck:
    """Both sides of the Kohnen identity with the truncation bound and the combined error."""

    lhs: mp.mpc
    rhs: mp.mpc
    gap: mp.mpf
    bound: mp.mpf

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound


def kohnen_series_check(
    G0: Any,
    d: int,
    D2: int,
    s: Any,
    n_max: int,
    twist: int | None = None,
    threads: int = 1,
    order: int = DEFAULT_ORDER,
    tolerance: float = DEFAULT_TOLERANCE,
) -> KohnenCheck:
    """sum_{n <= n_max} c(d^2 n^2 |D2|)/c(|D2|) n^(-k-s) against L(G0, s+k) delta_d(s)/L(s+1, chi_D2).

    The tail is bounded through |c(n^2 |D|)/c(|D|)| <= d(n)^2 n^(k-1/2) <= 4 n^(k+1/2),
    which needs Re s > 3/2.
    """
    from .lfunc import delta_d, dirichlet_L, modular_L

    k = _half_weight(G0)
    s = mp.mpmathify(s)
    if mp.re(s) <= mp.mpf(3) / 2:
        raise InputValidationError(f"the truncation bound needs Re s > 3/2, got s={s}")
    if not is_fundamental(D2) or (-1) ** k * D2 <= 0:
        raise InputValidationError(f"D2={D2} must be fundamental with (-1)^k D2 > 0")
    level = int(G0.level)
    if level % d:
        raise InputValidationError(f"d={d} does not divide the level {level}")
    if n_max < 1:
        raise InputValidationError("n_max must be positive")
    if twist is None:
        twist = 1 if k % 2 == 0 else D2
    base_index = abs(D2)
    indices = [d * d * n * n * base_index for n in range(1, n_max + 1)]
    unique = sorted({base_index, *indices})
    computed = shintani_coefficients(G0, twist, unique, threads, order=order, tolerance=tolerance)
    by_index = {trace.index: trace for trace in computed}
    base = by_index[base_index]
    lhs = mp.mpc(0)
    lhs_error = mp.mpf(0)
    for n, index in enumerate(indices, start=1):
        trace = by_index[index]
        ratio = _checked_ratio(trace, base)
        weight = mp.power(n, -(k + s))
        lhs += ratio * weight
        lhs_error += abs(weight) * (trace.error + abs(ratio) * base.error) / abs(base.value)
    sigma = mp.re(s)
    tail = 4 * mp.power(n_max, mp.mpf(3) / 2 - sigma) / (sigma - mp.mpf(3) / 2)
    top = modular_L(G0, s + k)
    factor = delta_d(G0, d, s)
    bottom = dirichlet_L(D2, s + 1)
    rhs = top.value * factor / bottom.value
    rhs_error = abs(rhs) * (top.error / max(abs(top.value), mp.eps) + bottom.error / abs(bottom.value))
    gap = abs(lhs - rhs)
    bound = tail + lhs_error + rhs_error
    LOGGER.debug(
        "shintani.kohnen",
        extra={"event": "shintani.kohnen", "gap": mp.nstr(gap, 5), "bound": mp.nstr(bound, 5)},
    )
    return KohnenCheck(lhs, rhs, gap, bound)
