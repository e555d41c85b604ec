"""Dirichlet and modular L-functions, Petersson norms and the Rankin-Selberg product."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from math import isqrt
from typing import Any

import mpmath as mp

from .bqf import BQF, class_number, indefinite_classes, pell_solution
from .exceptions import CoefficientShortageError, InputValidationError, PrecisionError
from .numtheory import (
    gamma_R,
    heegner_condition,
    is_fundamental,
    is_squarefree,
    kronecker,
    partial_zeta,
    prime_divisors,
)
from .quadrature import gauss_legendre_nodes, panel
from .qexp.evaluate import fricke_eigenvalue
from .qexp.operators import trace_cosets
from .shintani import ShintaniCoefficient, shintani_constant, twisted_trace

LOGGER = logging.getLogger(__name__)

DEFAULT_CUTOFF = 1
UNITS = {-3: 6, -4: 4}


@dataclass(frozen=True)
class DirichletChar:
    """The quadratic character n -> (D/n) of a fundamental discriminant D (D = 1 is trivial)."""

    D: int

    def __post_init__(self) -> None:
        if self.D != 1 and not is_fundamental(self.D):
            raise InputValidationError(f"{self.D} is not a fundamental discriminant")

    @property
    def modulus(self) -> int:
        return abs(self.D)

    @property
    def parity(self) -> int:
        """0 for even characters (D > 0), 1 for odd ones."""
        return 0 if self.D > 0 else 1

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)

    def values(self) -> list[int]:
        return [self(n) for n in range(self.modulus)]


@dataclass(frozen=True)
class LValue:
    """An L-value at s with an error estimate, the evaluation method and named factors."""

    s: mp.mpc
    value: mp.mpc
    error: mp.mpf
    method: str
    factors: dict[str, Any] = field(default_factory=dict, compare=False)

    def as_dict(self, digits: int = 20) -> dict[str, Any]:
        return {
            "s_re": mp.nstr(mp.re(self.s), digits),
            "s_im": mp.nstr(mp.im(self.s), digits),
            "value_re": mp.nstr(mp.re(self.value), digits),
            "value_im": mp.nstr(mp.im(self.value), digits),
            "error": mp.nstr(self.error, 5),
            "method": self.method,
            "factors": {name: mp.nstr(value, digits) for name, value in self.factors.items()},
        }


def _series_length(chi: DirichletChar) -> int:
    budget = mp.mp.prec * mp.log(2) + 40
    return isqrt(int(chi.modulus * budget / mp.pi)) + 2


def _smoothed_terms(chi: DirichletChar, s: mp.mpc, n: int) -> mp.mpc:
    A = chi.modulus
    a = chi.parity
    x = mp.mpf(A) / mp.pi
    y = mp.pi * n * n / A
    u = (s + a) / 2
    v = (1 - s + a) / 2
    return mp.power(x, u) * mp.power(n, -s) * mp.gammainc(u, y) + mp.power(x, v) * mp.power(n, s - 1) * mp.gammainc(
        v, y
    )


def _smoothed_sum(chi: DirichletChar, s: mp.mpc) -> tuple[mp.mpc, mp.mpf]:
    """(A/pi)^((s+a)/2) Gamma((s+a)/2) L(s, chi) and the size of the first omitted term."""
    length = _series_length(chi)
    total = mp.fsum(chi(n) * _smoothed_terms(chi, s, n) for n in range(1, length + 1) if chi(n))
    tail = abs(_smoothed_terms(chi, s, length + 1))
    return total, tail + mp.eps * abs(total) * length


def _gamma_pole(u: mp.mpc) -> bool:
    return mp.im(u) == 0 and mp.re(u) <= 0 and mp.re(u) == mp.floor(mp.re(u))


def dirichlet_L(D: int, s: Any, method: str = "afe") -> LValue:
    """L(s, chi_D).

    ``method="afe"`` sums the smoothed series with incomplete Gamma weights;
    ``method="hurwitz"`` uses mpmath's periodic Dirichlet series.  D = 1 is zeta.
    """
    chi = DirichletChar(D)
    s = mp.mpmathify(s)
    if D == 1:
        if s == 1:
            raise InputValidationError("zeta has a pole at s = 1")
        value = mp.zeta(s)
        return LValue(s, mp.mpc(value), mp.eps * 16 * max(abs(value), 1), "zeta")
    u = (s + chi.parity) / 2
    if method == "hurwitz" or (method == "afe" and _gamma_pole(u)):
        value = mp.dirichlet(s, chi.values())
        return LValue(s, mp.mpc(value), mp.eps * 16 * chi.modulus * max(abs(value), 1), "hurwitz")
    if method != "afe":
        raise InputValidationError(f"unknown method {method!r}; expected 'afe' or 'hurwitz'")
    completed, error = _smoothed_sum(chi, s)
    scale = mp.power(mp.mpf(chi.modulus) / mp.pi, u) * mp.gamma(u)
    result = LValue(s, completed / scale, error / abs(scale), "afe")
    LOGGER.debug(
        "lfunc.dirichlet",
        extra={"event": "lfunc.dirichlet", "D": D, "s": mp.nstr(s, 10), "error": mp.nstr(result.error, 5)},
    )
    return result


def completed_Lambda(D: int, s: Any, conductor: int | None = None) -> LValue:
    """Lambda(s, chi_D) = A^(s/2) Gamma_R(s + a) L(s, chi_D), a = 0 or 1 the parity; Lambda(s) = Lambda(1-s)."""
    chi = DirichletChar(D)
    s = mp.mpmathify(s)
    A = chi.modulus if conductor is None else conductor
    if A < 1:
        raise InputValidationError(f"conductor must be positive, got {A}")
    if D == 1:
        if s in (0, 1):
            raise InputValidationError(f"the completed zeta function has a pole at s={s}")
        value = mp.power(A, s / 2) * gamma_R(s) * mp.zeta(s)
        return LValue(s, mp.mpc(value), mp.eps * 16 * max(abs(value), 1), "zeta")
    completed, error = _smoothed_sum(chi, s)
    # (A/pi)^((s+a)/2) Gamma((s+a)/2) = A^(s/2 + a/2) Gamma_R(s + a)
    scale = mp.power(mp.mpf(A) / chi.modulus, s / 2) * mp.power(chi.modulus, -mp.mpf(chi.parity) / 2)
    return LValue(s, scale * completed, abs(scale) * error, "afe")


@dataclass(frozen=True)
class ClassNumberCheck:
    """L(1, chi_D) against its class-number expression."""

    D: int
    lhs: mp.mpf
    rhs: mp.mpf
    gap: mp.mpf


def class_number_formula_check(D: int) -> ClassNumberCheck:
    """L(1, chi_D) = 2 pi h/(w sqrt|D|) for D < 0 and h^+ log(eps^+)/sqrt(D) for D > 0.

    h^+ counts proper classes and eps^+ = (t + u sqrt D)/2 is the generator of the
    totally positive units, the fundamental solution of t^2 - D u^2 = 4.
    """
    if D == 1 or not is_fundamental(D):
        raise InputValidationError(f"{D} is not a nontrivial fundamental discriminant")
    value = dirichlet_L(D, 1).value
    if D < 0:
        w = UNITS.get(D, 2)
        rhs = 2 * mp.pi * class_number(D) / (w * mp.sqrt(-D))
    else:
        b = D % 2
        t, u = pell_solution(BQF(1, b, (b - D) // 4))
        unit = (t + u * mp.sqrt(D)) / 2
        narrow = sum(1 for f in indefinite_classes(D) if f.is_primitive)
        rhs = narrow * mp.log(unit) / mp.sqrt(D)
    return ClassNumberCheck(D, mp.re(value), rhs, abs(value - rhs))


def _fricke_sign(G0: Any, fricke: int | None) -> int:
    if fricke is not None:
        if fricke not in (1, -1):
            raise InputValidationError(f"the Fricke sign must be +1 or -1, got {fricke}")
        return fricke
    if getattr(G0, "fricke", None) is not None:
        return int(G0.fricke)
    return fricke_eigenvalue(G0)


def _modular_length(N: int, w: int, s: mp.mpc, cutoff: mp.mpf) -> int:
    budget = mp.mp.prec * mp.log(2) + 20
    step = 2 * mp.pi * min(cutoff, 1 / cutoff) / mp.sqrt(N)
    spread = w + abs(mp.re(s))
    n = 1
    while n * step <= budget + spread * mp.log(n + 1):
        n += 1
    return n


def _coefficients(G0: Any, count: int) -> list[int]:
    try:
        return [G0.coefficient(n) for n in range(1, count + 1)]
    except CoefficientShortageError as exc:
        raise CoefficientShortageError(
            f"the approximate functional equation needs a_n for n <= {count}: {exc}", required=count
        ) from exc


def modular_Lambda(G0: Any, s: Any, cutoff: Any = DEFAULT_CUTOFF, fricke: int | None = None) -> LValue:
    """Lambda(G0, s) = N^(s/2) (2 pi)^(-s) Gamma(s) L(G0, s) = eta Lambda(G0, w - s).

    The sum splits the Mellin integral at y = cutoff; eta = i^w eps with eps the
    Fricke sign in f(-1/(N tau)) = eps N^(w/2) tau^w f(tau).
    """
    weight = Fraction(G0.weight)
    if weight.denominator != 1 or int(weight) % 2:
        raise InputValidationError(f"modular L-functions need even integral weight, got {weight}")
    w = int(weight)
    N = int(G0.level)
    s = mp.mpmathify(s)
    c = mp.mpf(cutoff)
    if c <= 0:
        raise InputValidationError(f"cutoff must be positive, got {cutoff}")
    sign = (-1) ** (w // 2) * _fricke_sign(G0, fricke)
    length = _modular_length(N, w, s, c)
    coeffs = _coefficients(G0, length)
    root = mp.sqrt(N)
    total = mp.mpc(0)
    for n, a in enumerate(coeffs, start=1):
        if not a:
            continue
        x = 2 * mp.pi * n / root
        total += a * (
            mp.power(x, -s) * mp.gammainc(s, x * c) + sign * mp.power(x, s - w) * mp.gammainc(w - s, x / c)
        )
    x = 2 * mp.pi * (length + 1) / root
    bound = 2 * mp.power(length + 1, mp.mpf(w) / 2)
    tail = bound * (
        abs(mp.power(x, -s) * mp.gammainc(s, x * c)) + abs(mp.power(x, s - w) * mp.gammainc(w - s, x / c))
    )
    error = tail + mp.eps * length * max(abs(total), 1)
    LOGGER.debug(
        "lfunc.modular",
        extra={"event": "lfunc.modular", "level": N, "terms": length, "error": mp.nstr(error, 5)},
    )
    return LValue(s, total, error, "afe", {"sign": mp.mpf(sign), "terms": mp.mpf(length)})


def modular_L(G0: Any, s: Any, cutoff: Any = DEFAULT_CUTOFF, fricke: int | None = None) -> LValue:
    """L(G0, s) from ``modular_Lambda``; the sign of the functional equation is (-1)^(w/2) eps."""
    completed = modular_Lambda(G0, s, cutoff, fricke)
    s = completed.s
    if _gamma_pole(s):
        return LValue(s, mp.mpc(0), completed.error, "afe", dict(completed.factors))
    scale = mp.power(int(G0.level), s / 2) * mp.power(2 * mp.pi, -s) * mp.gamma(s)
    factors = dict(completed.factors)
    factors["Lambda"] = completed.value
    return LValue(s, completed.value / scale, completed.error / abs(scale), "afe", factors)


@dataclass(frozen=True)
class PeterssonNorm:
    """Integral of |G|^2 y^w over Gamma_0(N)\\H and the hyperbolic area of the same domain."""

    value: mp.mpf
    area: mp.mpf
    index: int


def _outer_nodes(order: int) -> list[tuple[mp.mpf, mp.mpf]]:
    xs, ws = gauss_legendre_nodes(order)
    quarter = mp.mpf(1) / 4
    return [(quarter + quarter * x, quarter * w) for x, w in zip(xs, ws)]


def domain_area(level: int, order: int = 24) -> mp.mpf:
    """Area of Gamma_0(N)\\H from the coset decomposition, index * 2 int_0^(1/2) dx/sqrt(1 - x^2)."""
    index = len(trace_cosets(level, 1))
    return 2 * index * mp.fsum(w / mp.sqrt(1 - x * x) for x, w in _outer_nodes(order))


def _decay_height(level: int, w: int) -> mp.mpf:
    budget = mp.mp.prec * mp.log(2) + w * mp.log(10 * level + w)
    return max(mp.mpf(2), level * budget / (4 * mp.pi))


def petersson_norm(
    G: Callable[[mp.mpc], mp.mpc],
    weight: Any = None,
    level: int | None = None,
    order: int = 24,
) -> PeterssonNorm:
    """<G, G> = int over Gamma_0(N)\\H of |G(z)|^2 y^w dmu, without index normalisation.

    The domain is the union of gamma F over coset representatives gamma, F the
    standard fundamental domain truncated at a height where G decays at every cusp.
    """
    w_raw = Fraction(weight if weight is not None else G.weight)  # type: ignore[attr-defined]
    if w_raw.denominator != 1 or w_raw < 1:
        raise InputValidationError(f"petersson_norm needs a positive integral weight, got {w_raw}")
    w = int(w_raw)
    N = int(level if level is not None else G.level)  # type: ignore[attr-defined]
    cosets = trace_cosets(N, 1)
    top = _decay_height(N, w)

    def density(z: mp.mpc) -> mp.mpf:
        total = mp.mpf(0)
        for (a, b), (c, d) in cosets:
            image = (a * z + b) / (c * z + d)
            total += abs(G(image)) ** 2 * mp.im(image) ** w
        return total

    def column(x: mp.mpf) -> mp.mpf:
        bottom = mp.sqrt(1 - x * x)
        edges = [bottom]
        while edges[-1] + 1 < top:
            edges.append(edges[-1] + 1)
        edges.append(top)
        return mp.fsum(
            mp.re(panel(lambda y: density(mp.mpc(x, y)) / (y * y), lo, hi, order)) for lo, hi in zip(edges, edges[1:])
        )

    nodes = _outer_nodes(order)
    value = 2 * mp.fsum(weight_x * column(x) for x, weight_x in nodes)
    area = 2 * len(cosets) * mp.fsum(weight_x / mp.sqrt(1 - x * x) for x, weight_x in nodes)
    if not mp.isfinite(value):
        raise PrecisionError("Petersson quadrature produced a non-finite value")
    LOGGER.debug(
        "lfunc.petersson",
        extra={"event": "lfunc.petersson", "level": N, "cosets": len(cosets), "height": mp.nstr(top, 6)},
    )
    return PeterssonNorm(value, area, len(cosets))


def C_k(k: int, s: Any) -> mp.mpc:
    """binom(-k/2, (k-1)/2) 2^(3-3k) pi^(-k-s-1/2) Gamma(k+s)/Gamma(1+s) Gamma(s/2+1)."""
    s = mp.mpmathify(s)
    k_mp = mp.mpf(k)
    return (
        mp.binomial(-k_mp / 2, (k_mp - 1) / 2)
        * mp.power(2, 3 - 3 * k)
        * mp.power(mp.pi, -k - s - mp.mpf(1) / 2)
        * mp.gamma(k + s)
        / mp.gamma(1 + s)
        * mp.gamma(s / 2 + 1)
    )


def _local_pole(p: int, s: mp.mpc) -> mp.mpc:
    denominator = 1 - mp.power(p, -1 - s)
    if abs(denominator) < mp.eps * 16:
        raise InputValidationError(f"local factor has a pole at p={p}, s={s}")
    return denominator


def gamma_p0(G0: Any, p: int, s: Any) -> mp.mpc:
    """Local factor at a prime of the level dividing neither N_0 nor N_3."""
    s = mp.mpmathify(s)
    k = int(Fraction(G0.weight)) // 2
    a = G0.coefficient(p)
    pole = _local_pole(p, s)
    inv = mp.mpf(1) / p
    first = -mp.power(p, -k - s) / pole * a
    numerator = (1 + inv) * mp.power(p, -2 * s) - (3 + inv) * mp.power(p, -s) + 2 * p
    return first + numerator / ((p - 1) * pole)


def gamma_p1(G0: Any, p: int, s: Any) -> mp.mpc:
    """Local factor at a prime dividing N_3."""
    s = mp.mpmathify(s)
    k = int(Fraction(G0.weight)) // 2
    a = G0.coefficient(p)
    pole = _local_pole(p, s)
    first = (mp.power(p, -2 * s) - 2 * mp.power(p, 1 - s) + p) / ((p - 1) * pole) * a
    second = mp.power(p, k) * (1 + mp.power(p, -s)) / pole
    return mp.power(p, -2 * k) * (first + second)


def delta_d(G0: Any, d: int, s: Any) -> mp.mpc:
    """zeta_d(s+1) prod_{p | d} (a(p) - p^(k-1) (1 + p^(-s))); 1 for d = 1."""
    if d < 1 or not is_squarefree(d):
        raise InputValidationError(f"d must be a positive squarefree integer, got {d}")
    s = mp.mpmathify(s)
    if d == 1:
        return mp.mpc(1)
    k = int(Fraction(G0.weight)) // 2
    result = partial_zeta(d, s + 1)
    for p in prime_divisors(d):
        result *= G0.coefficient(p) - mp.power(p, k - 1) * (1 + mp.power(p, -s))
    return result


def _check_rankin_input(G0: Any, N: int, N3: int, D1: int, D2: int) -> int:
    weight = Fraction(G0.weight)
    if weight.denominator != 1 or int(weight) % 4 != 2:
        raise InputValidationError(f"the weight 2k must have k odd, got {weight}")
    N0 = int(G0.level)
    if N < 1 or N % 2 == 0 or not is_squarefree(N):
        raise InputValidationError(f"N={N} must be odd and squarefree")
    if N % (N0 * N3):
        raise InputValidationError(f"N_0 N_3 = {N0 * N3} must divide N = {N}")
    if D1 == D2:
        raise InputValidationError("D1 and D2 must be distinct")
    for D in (D1, D2):
        if D >= 0 or not is_fundamental(D):
            raise InputValidationError(f"{D} is not a negative fundamental discriminant")
        if not heegner_condition(D, N):
            raise InputValidationError(f"D={D} does not satisfy the Heegner condition for N={N}")
    if D1 % 2 == 0 and D2 % 2 == 0:
        raise InputValidationError("D1 and D2 must not both be even")
    return int(weight) // 2


def rankin_trace(G0: Any, D1: int, D2: int, threads: int = 1, tolerance: float = 1e-12) -> ShintaniCoefficient:
    """t_{D1}(|D2|), proportional to conj(c(|D1|)) c(|D2|) for the Shimura lift of G0."""
    return twisted_trace(G0, D1, abs(D2), threads=threads, tolerance=tolerance)


def rankin_selberg_L(
    G0: Any,
    D1: int,
    D2: int,
    s: Any,
    N: int | None = None,
    N3: int = 1,
    trace: ShintaniCoefficient | None = None,
    threads: int = 1,
    cutoff: Any = DEFAULT_CUTOFF,
) -> LValue:
    """L(s, G; D1, D2) for G(z) = G0(N_3 z) of level N, as an explicit product.

    The Petersson ratio times conj(c(|D1|)) c(|D2|) comes from the twisted trace
    t_{D1}(|D2|) divided by three times the Shintani constant; it can be passed
    in as ``trace`` since it does not depend on s.
    """
    N = int(G0.level) * N3 if N is None else N
    k = _check_rankin_input(G0, N, N3, D1, D2)
    s = mp.mpmathify(s)
    N0 = int(G0.level)
    epsilon = _fricke_sign(G0, None)
    if epsilon == -1:
        LOGGER.debug("lfunc.rankin_vanishes", extra={"event": "lfunc.rankin_vanishes", "level": N0})
        return LValue(s, mp.mpc(0), mp.mpf(0), "fricke", {"one_plus_epsilon": mp.mpf(0)})

    if trace is None:
        trace = rankin_trace(G0, D1, D2, threads)
    kappa = shintani_constant(k)
    kappa_mp = 3 * mp.mpf(kappa.numerator) / kappa.denominator
    coefficients = trace.value / kappa_mp
    coefficient_error = trace.error / abs(kappa_mp)

    modular = modular_L(G0, s + k, cutoff)
    lambda1 = completed_Lambda(D1, s + 1)
    lambda2 = completed_Lambda(D2, s + 1)
    discriminant = mp.power(abs(D1 * D2), mp.mpf(k - 1) / 2)
    constant = C_k(k, s)
    at_one = partial_zeta(N, 1)
    zeta_ratio = partial_zeta(N, s + 1) * at_one.denominator / at_one.numerator
    outer = N // (N0 * N3)
    gamma0 = mp.mpc(1)
    for p in prime_divisors(outer) if outer > 1 else ():
        gamma0 *= gamma_p0(G0, p, s)
    gamma1 = mp.mpc(1)
    for p in prime_divisors(N3) if N3 > 1 else ():
        gamma1 *= gamma_p1(G0, p, s)

    factors = {
        "one_plus_epsilon": mp.mpf(2),
        "coefficients": coefficients,
        "L_G0": modular.value,
        "Lambda_1": lambda1.value,
        "Lambda_2": lambda2.value,
        "discriminant": discriminant,
        "C_k": constant,
        "zeta_ratio": zeta_ratio,
        "gamma_p0": gamma0,
        "gamma_p1": gamma1,
    }
    scale = 2 * constant * zeta_ratio * gamma0 * gamma1 / (lambda1.value * lambda2.value * discriminant)
    rest = modular.value * scale
    value = coefficients * rest
    relative = mp.fsum(item.error / abs(item.value) for item in (lambda1, lambda2))
    error = (
        coefficient_error * abs(rest)
        + abs(coefficients * scale) * modular.error
        + abs(value) * relative
    )
    LOGGER.debug(
        "lfunc.rankin",
        extra={"event": "lfunc.rankin", "s": mp.nstr(s, 10), "N": N, "N3": N3, "error": mp.nstr(error, 5)},
    )
    return LValue(s, value, error, "product", factors)


def derivative(fn: Callable[[mp.mpc], LValue], s: Any, step: Any = None) -> LValue:
    """Central difference (F(s+h) - F(s-h))/(2h) with the h versus h/2 spread as error."""
    s = mp.mpmathify(s)
    h = mp.mpf(step) if step is not None else mp.power(mp.eps, mp.mpf(1) / 3)
    if h <= 0:
        raise InputValidationError(f"step must be positive, got {step}")

    def central(width: mp.mpf) -> tuple[mp.mpc, mp.mpf]:
        plus, minus = fn(s + width), fn(s - width)
        return (plus.value - minus.value) / (2 * width), (plus.error + minus.error) / (2 * width)

    coarse, coarse_error = central(h)
    fine, fine_error = central(h / 2)
    # Richardson: the h^2 terms cancel
    value = (4 * fine - coarse) / 3
    error = abs(fine - coarse) / 3 + fine_error + coarse_error
    return LValue(s, value, error, "central-difference")


def rankin_selberg_derivative(
    G0: Any,
    D1: int,
    D2: int,
    s: Any = 0,
    N: int | None = None,
    N3: int = 1,
    trace: ShintaniCoefficient | None = None,
    threads: int = 1,
    step: Any = None,
) -> LValue:
    """d/ds L(s, G; D1, D2), the twisted trace computed once."""
    if trace is None and _fricke_sign(G0, None) == 1:
        trace = rankin_trace(G0, D1, D2, threads)
    return derivative(lambda x: rankin_selberg_L(G0, D1, D2, x, N, N3, trace, threads), s, step)
