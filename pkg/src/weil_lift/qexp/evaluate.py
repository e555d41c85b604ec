"""Numerical evaluation of modular forms from their q-expansions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging
from math import floor, gcd
from typing import Any

import mpmath as mp

from ..exceptions import HeightError, InputValidationError, PrecisionError
from ..numtheory import IDENTITY, Matrix2, act_on_point, complete_sl2, mat_mul, translation
from .eta import EtaQuotient
from .forms import Newform
from .series import QExpansion

LOGGER = logging.getLogger(__name__)

MIN_HEIGHT = 0.4
FRICKE_SAMPLES = (("0.1", "0.8"), ("-0.23", "0.61"), ("0.37", "1.1"))


@dataclass(frozen=True)
class Evaluation:
    """f(tau) with an error estimate, the height used and the matrix applied to tau."""

    value: mp.mpc
    error: mp.mpf
    height: mp.mpf
    matrix: Matrix2


def gamma0_reduce(tau: Any, N: int) -> tuple[mp.mpc, Matrix2]:
    """(gamma tau, gamma) with gamma in Gamma_0(N) maximizing the imaginary part, |Re| <= 1/2.

    Im(gamma tau) = Im(tau)/|c tau + d|^2 depends only on the bottom row, so the
    search runs over c = N, 2N, ... with c Im(tau) < 1 and the d closest to -c Re(tau).
    """
    if N < 1:
        raise InputValidationError(f"level must be positive, got {N}")
    tau = mp.mpc(mp.mpmathify(tau))
    x, y = mp.re(tau), mp.im(tau)
    if y <= 0:
        raise InputValidationError("tau must lie in the upper half-plane")
    best: tuple[mp.mpf, int, int] = (mp.mpf(1), 0, 1)
    c = N
    while c * y < 1:
        centre = -c * x
        for d in range(floor(centre) - 1, floor(centre) + 3):
            if gcd(c, d) != 1:
                continue
            size = abs(c * tau + d)
            if size < best[0]:
                best = (size, c, d)
        c += N
    _, c, d = best
    gamma = complete_sl2(c, d) if c else IDENTITY
    moved = act_on_point(gamma, tau)
    shift = int(mp.nint(mp.re(moved)))
    if shift:
        gamma = mat_mul(translation(-shift), gamma)
        moved -= shift
    return moved, gamma


def _series_for(form: Any, order: int | None) -> QExpansion:
    if isinstance(form, QExpansion):
        return form
    if hasattr(form, "qexp"):
        return form.qexp(order) if order is not None else form.qexp()
    raise InputValidationError(f"cannot expand {type(form).__name__} as a q-series")


def _sum_series(series: QExpansion, tau: mp.mpc) -> tuple[mp.mpc, mp.mpf]:
    q = mp.expjpi(2 * tau)
    root = mp.expjpi(2 * tau / series.den) if series.den > 1 else None
    value = series.evaluate_q(q, root)
    return value, series.tail_bound(abs(q))


def evaluate(
    form: Any,
    tau: Any,
    order: int | None = None,
    min_height: float = MIN_HEIGHT,
) -> Evaluation:
    """Evaluate an eta quotient, newform or q-expansion at tau.

    The point is moved by Gamma_0(N), and for newforms with a known Fricke sign
    also by the Fricke involution, to the largest available height before the
    series is summed; f(tau) = (c tau + d)^(-w) f(gamma tau).
    """
    tau = mp.mpc(mp.mpmathify(tau))
    if mp.im(tau) <= 0:
        raise InputValidationError("tau must lie in the upper half-plane")
    quotient = form if isinstance(form, EtaQuotient) else getattr(form, "eta_quotient", None)
    if isinstance(quotient, EtaQuotient):
        return Evaluation(quotient(tau), mp.eps * 16, mp.im(tau), IDENTITY)

    series = _series_for(form, order)
    weight = Fraction(series.weight)
    N = series.level
    if weight.denominator != 1:
        shift = int(mp.nint(mp.re(tau)))
        candidates = [(tau - shift, translation(-shift), mp.mpc(1))]
    else:
        w = int(weight)
        moved, gamma = gamma0_reduce(tau, N)
        c, d = gamma[1]
        candidates = [(moved, gamma, mp.power(c * tau + d, -w))]
        fricke = getattr(form, "fricke", None)
        if isinstance(form, Newform) and fricke is not None:
            sigma = -1 / (N * tau)
            moved_s, gamma_s = gamma0_reduce(sigma, N)
            c, d = gamma_s[1]
            factor = fricke * mp.power(N, mp.mpf(w) / 2) * mp.power(sigma, w) * mp.power(c * sigma + d, -w)
            candidates.append((moved_s, gamma_s, factor))
    point, matrix, factor = max(candidates, key=lambda item: mp.im(item[0]))
    height = mp.im(point)
    if height < min_height:
        raise HeightError(
            f"tau={mp.nstr(tau, 10)} only reaches height {mp.nstr(height, 6)} < {min_height}",
            achieved=float(height),
        )
    value, tail = _sum_series(series, point)
    result = Evaluation(factor * value, abs(factor) * tail, height, matrix)
    LOGGER.debug(
        "qexp.evaluate",
        extra={
            "event": "qexp.evaluate",
            "height": mp.nstr(height, 8),
            "error": mp.nstr(result.error, 5),
            "level": N,
        },
    )
    return result


def fricke_eigenvalue(form: Any, samples: tuple[tuple[str, str], ...] = FRICKE_SAMPLES) -> int:
    """Numerical Fricke sign eps with f(-1/(N tau)) = eps N^(w/2) tau^w f(tau).

    Each sample must round to +1 or -1 with the same sign.
    """
    target = form.with_fricke(None) if isinstance(form, Newform) else form
    weight = Fraction(target.weight)
    if weight.denominator != 1 or int(weight) % 2:
        raise InputValidationError("the Fricke sign is only defined here for even integral weight")
    w = int(weight)
    N = target.level
    signs = []
    for re_part, im_part in samples:
        tau = mp.mpc(re_part, im_part) / mp.sqrt(N)
        left = evaluate(target, -1 / (N * tau), min_height=0.0).value
        right = evaluate(target, tau, min_height=0.0).value
        denominator = mp.power(N, mp.mpf(w) / 2) * mp.power(tau, w) * right
        if abs(denominator) < mp.eps * 1e6:
            continue
        ratio = left / denominator
        sign = 1 if mp.re(ratio) > 0 else -1
        if abs(ratio - sign) > 1e-6:
            raise PrecisionError(f"Fricke ratio {mp.nstr(ratio, 10)} at tau={mp.nstr(tau, 8)} is not +-1")
        signs.append(sign)
    if not signs or len(set(signs)) != 1:
        raise PrecisionError(f"inconsistent Fricke samples: {signs}")
    return signs[0]

