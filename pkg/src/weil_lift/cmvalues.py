"""Higher Green functions, CM cycles and norms of hauptmodul differences."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from functools import partial
import logging
from math import gcd
from typing import Any

import mpmath as mp

from .bqf import BQF, HeegnerPoint, class_number, genus_char_prime, heegner_points
from .exceptions import InputValidationError, IntegralityError
from .numtheory import (
    IDENTITY,
    complete_sl2,
    divisors,
    factorization,
    is_fundamental,
    is_squarefree,
    omega,
    prime_divisors,
    psi_index,
    translation,
)
from .precision import working_precision
from .qexp.forms import hauptmodul_function
from .quadrature import integrate_until_decay
from .workers import ordered_map

LOGGER = logging.getLogger(__name__)

CM_START_BITS = 256
CM_HEADROOM_BITS = 64


def _check_t(t: Any) -> mp.mpf:
    t = mp.mpmathify(t)
    if mp.im(t) != 0 or mp.re(t) <= 1:
        raise InputValidationError(f"Q_(s-1)(t) needs real t > 1, got {t}")
    return mp.re(t)


def legendre_Q(s: Any, t: Any, method: str = "integral") -> mp.mpc:
    """Q_(s-1)(t), the Legendre function of the second kind, for real t > 1.

    ``integral``: int_0^oo (t + sqrt(t^2-1) cosh v)^(-s) dv, Re s > 0.
    ``hypergeometric``: sqrt(pi) Gamma(s)/(Gamma(s+1/2) (2t)^s) 2F1(s/2, (s+1)/2; s+1/2; 1/t^2).
    """
    t = _check_t(t)
    s = mp.mpmathify(s)
    if method == "hypergeometric":
        return (
            mp.sqrt(mp.pi)
            * mp.gamma(s)
            / (mp.gamma(s + mp.mpf(1) / 2) * mp.power(2 * t, s))
            * mp.hyp2f1(s / 2, (s + 1) / 2, s + mp.mpf(1) / 2, 1 / (t * t))
        )
    if method != "integral":
        raise InputValidationError(f"unknown method {method!r}; expected 'integral' or 'hypergeometric'")
    if mp.re(s) <= 0:
        raise InputValidationError(f"the integral representation needs Re s > 0, got s={s}")
    root = mp.sqrt(t * t - 1)
    result = integrate_until_decay(lambda v: mp.power(t + root * mp.cosh(v), -s), 0, 1, 1, tolerance=1e-25)
    return result.value


def cosh_distance(z1: Any, z2: Any) -> mp.mpf:
    """cosh of the hyperbolic distance, 1 + |z1 - z2|^2/(2 y1 y2)."""
    z1, z2 = mp.mpc(z1), mp.mpc(z2)
    y1, y2 = mp.im(z1), mp.im(z2)
    if y1 <= 0 or y2 <= 0:
        raise InputValidationError("points must lie in the upper half-plane")
    return 1 + abs(z1 - z2) ** 2 / (2 * y1 * y2)


def green_g(s: Any, z1: Any, z2: Any, method: str = "hypergeometric") -> mp.mpc:
    """g_s(z1, z2) = -2 Q_(s-1)(cosh d(z1, z2)); singular on the diagonal."""
    t = cosh_distance(z1, z2)
    if t - 1 < mp.eps * 1024:
        raise InputValidationError(f"the points {mp.nstr(z1, 8)} and {mp.nstr(z2, 8)} coincide")
    return -2 * legendre_Q(s, t, method)


@dataclass(frozen=True)
class GreenValue:
    """A Green-function value, the bound on the neglected lattice tail and the number of terms."""

    value: mp.mpc
    tail: mp.mpf
    terms: int

    def as_dict(self, digits: int = 20) -> dict[str, Any]:
        return {
            "value_re": mp.nstr(mp.re(self.value), digits),
            "value_im": mp.nstr(mp.im(self.value), digits),
            "tail": mp.nstr(self.tail, 5),
            "terms": self.terms,
        }


def _asymptotic_constant(s: mp.mpc) -> mp.mpc:
    """Q_(s-1)(t) ~ c_s t^(-s) as t -> oo."""
    return mp.sqrt(mp.pi) * mp.gamma(s) / (mp.gamma(s + mp.mpf(1) / 2) * mp.power(2, s))


def _orbit_points(N: int, z1: mp.mpc, z2: mp.mpc, cutoff: mp.mpf) -> Iterable[mp.mpc]:
    """gamma z2 for gamma in Gamma_0(N)/{+-1} with cosh d(z1, gamma z2) <= cutoff."""
    x1, y1 = mp.re(z1), mp.im(z1)
    x2, y2 = mp.re(z2), mp.im(z2)
    bound = 2 * cutoff * y2 / y1
    c = 0
    while c * c * y2 * y2 <= bound:
        room = bound - c * c * y2 * y2
        if c == 0:
            rows = [(0, 1)]
        else:
            spread = mp.sqrt(room)
            lo = int(mp.floor(-c * x2 - spread))
            hi = int(mp.ceil(-c * x2 + spread))
            rows = [(c, d) for d in range(lo, hi + 1) if gcd(c, d) == 1]
        for row in rows:
            gamma = IDENTITY if row == (0, 1) else complete_sl2(*row)
            (a, b), (cc, d) = gamma
            w = (a * z2 + b) / (cc * z2 + d)
            height = mp.im(w)
            if height < y1 / (2 * cutoff):
                continue
            width = mp.sqrt(2 * cutoff * y1 * height)
            first = int(mp.floor(x1 - width - mp.re(w)))
            last = int(mp.ceil(x1 + width - mp.re(w)))
            for n in range(first, last + 1):
                yield w + n
        c += N


def green_GN(s: Any, N: int, z1: Any, z2: Any, cutoff: Any = 64, method: str = "hypergeometric") -> GreenValue:
    """G^N_s(z1, z2) = sum over Gamma_0(N)/{+-1} of g_s(z1, gamma z2), Re s > 1.

    Terms with cosh d <= cutoff are summed; the rest is bounded by the lattice
    point count (2 pi/vol) T and Q_(s-1)(t) ~ c_s t^(-s), with a factor 4 of slack.
    """
    s = mp.mpmathify(s)
    if mp.re(s) <= 1:
        raise InputValidationError(f"the averaged Green function needs Re s > 1, got s={s}")
    if N < 1:
        raise InputValidationError(f"level must be positive, got {N}")
    z1, z2 = mp.mpc(z1), mp.mpc(z2)
    T = mp.mpf(cutoff)
    if T <= 1:
        raise InputValidationError(f"cutoff must exceed 1, got {cutoff}")
    total = mp.mpc(0)
    terms = 0
    for w in _orbit_points(N, z1, z2, T):
        t = cosh_distance(z1, w)
        if t > T:
            continue
        if t - 1 < mp.eps * 1024:
            raise InputValidationError(
                f"{mp.nstr(z2, 8)} is Gamma_0({N})-equivalent to {mp.nstr(z1, 8)}; the Green function is singular"
            )
        total += -2 * legendre_Q(s, t, method)
        terms += 1
    volume = mp.pi / 3 * psi_index(N)
    sigma = mp.re(s)
    tail = 4 * (4 * mp.pi / volume) * abs(_asymptotic_constant(s)) * mp.power(T, 1 - sigma) / (sigma - 1)
    LOGGER.debug(
        "green.lattice",
        extra={"event": "green.lattice", "level": N, "terms": terms, "tail": mp.nstr(tail, 5)},
    )
    return GreenValue(total, tail, terms)


def _hecke_cosets(m: int, N: int) -> list[tuple[int, int, int]]:
    return [(a, b, m // a) for a in divisors(m) if gcd(a, N) == 1 for b in range(m // a)]


def hecke_on_z2(F: Callable[[mp.mpc, mp.mpc], Any], m: int, N: int, z1: Any, z2: Any) -> Any:
    """sum_{ad = m, (a, N) = 1, 0 <= b < d} F(z1, (a z2 + b)/d)."""
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    z1, z2 = mp.mpc(z1), mp.mpc(z2)
    return _sum_values(F(z1, (a * z2 + b) / d) for a, b, d in _hecke_cosets(m, N))


def hecke_on_z1(F: Callable[[mp.mpc, mp.mpc], Any], m: int, N: int, z1: Any, z2: Any) -> Any:
    """The same coset sum acting on the first variable."""
    if m < 1:
        raise InputValidationError(f"m must be positive, got {m}")
    z1, z2 = mp.mpc(z1), mp.mpc(z2)
    return _sum_values(F((a * z1 + b) / d, z2) for a, b, d in _hecke_cosets(m, N))


def _sum_values(values: Iterable[Any]) -> Any:
    items = list(values)
    if items and isinstance(items[0], GreenValue):
        return GreenValue(
            mp.fsum(item.value for item in items),
            mp.fsum(item.tail for item in items),
            sum(item.terms for item in items),
        )
    return mp.fsum(items)


def _check_principal_part(principal: Iterable[tuple[int, Any]]) -> list[tuple[int, Any]]:
    terms = []
    for m, coefficient in principal:
        if int(m) < 1:
            raise InputValidationError(f"principal-part indices must be positive, got {m}")
        if mp.mpmathify(coefficient) < 0:
            raise InputValidationError(f"principal-part coefficients must be nonnegative, got {coefficient}")
        terms.append((int(m), coefficient))
    if not terms:
        raise InputValidationError("the principal part is empty")
    return terms


def green_Gkf(
    k: int,
    principal: Iterable[tuple[int, Any]],
    N: int,
    z1: Any,
    z2: Any,
    cutoff: Any = 64,
) -> GreenValue:
    """G_{k,f}(z1, z2) = sum_m c_f(-m) m^(k-1) (T_m G^N_k)(z1, z2), T_m acting on z2."""
    if k <= 1:
        raise InputValidationError(f"k must exceed 1, got {k}")
    total = GreenValue(mp.mpc(0), mp.mpf(0), 0)
    for m, coefficient in _check_principal_part(principal):
        part = hecke_on_z2(lambda a, b: green_GN(k, N, a, b, cutoff), m, N, z1, z2)
        weight = mp.mpmathify(coefficient) * mp.power(m, k - 1)
        total = GreenValue(
            total.value + weight * part.value,
            total.tail + abs(weight) * part.tail,
            total.terms + part.terms,
        )
    return total


@dataclass(frozen=True)
class GaloisCounts:
    """|Gal(H/K)| = h1 h2/2^omega(D0) and |Gal(H/Q)| = 4 |Gal(H/K)| for K = Q(sqrt D1, sqrt D2)."""

    over_K: int
    over_Q: int


def galois_counts(D1: int, D2: int) -> GaloisCounts:
    over_K = class_number(D1) * class_number(D2) // 2 ** omega(gcd(D1, D2))
    return GaloisCounts(over_K, 4 * over_K)


@dataclass(frozen=True)
class CMCycle:
    """Pairs of Heegner points (z1, z2) of discriminants D1, D2 on X_0(N)."""

    D1: int
    D2: int
    N: int
    pairs: tuple[tuple[HeegnerPoint, HeegnerPoint], ...]
    classes: int

    def __len__(self) -> int:
        return len(self.pairs)


def _check_cm_input(D1: int, D2: int, N: int) -> None:
    if D1 == D2:
        raise InputValidationError("D1 and D2 must be distinct")
    for D in (D1, D2):
        if D >= 0 or not is_fundamental(D):
            raise InputValidationError(f"{D} is not a negative fundamental discriminant")
    if D1 % 2 == 0 and D2 % 2 == 0:
        raise InputValidationError("D1 and D2 must not both be even")
    if N < 1 or N % 2 == 0 or not is_squarefree(N):
        raise InputValidationError(f"N={N} must be odd and squarefree")


def admissible(f1: BQF, f2: BQF, D0: int) -> bool:
    """Genus characters chi_{p*} agree on f1 and f2 for every prime p | D0."""
    if D0 == 1:
        return True
    return all(genus_char_prime(p, f1) == genus_char_prime(p, f2) for p in prime_divisors(D0))


def _shifted(point: HeegnerPoint, shift: int) -> HeegnerPoint:
    if not shift:
        return point
    return HeegnerPoint(point.form.act(translation(shift)), point.level, point.beta)


def heegner_form_for(D: int, N: int, beta: int | None = None) -> BQF:
    """The Heegner form [N A, B, C] of the principal class with B = beta mod 2N."""
    return heegner_points(D, N, beta)[0].form


def cm_cycle(
    D1: int,
    D2: int,
    N: int = 1,
    shift: int = 0,
    beta1: int | None = None,
    beta2: int | None = None,
) -> CMCycle:
    """The CM cycle: for each admissible class pair the four Heegner pairs
    (z1, z2), (-conj z1, -conj z2), (-conj z1, z2), (z1, -conj z2).

    The branches beta1, beta2 stay fixed across the cycle; ``shift`` translates
    every representative by an integer.
    """
    _check_cm_input(D1, D2, N)
    D0 = gcd(D1, D2)
    first = heegner_points(D1, N, beta1)
    second = heegner_points(D2, N, beta2)
    chosen = [(p1, p2) for p1 in first for p2 in second if admissible(p1.form, p2.form, D0)]
    pairs: list[tuple[HeegnerPoint, HeegnerPoint]] = []
    for p1, p2 in chosen:
        q1, q2 = _shifted(p1, shift), _shifted(p2, shift)
        pairs.extend(
            [
                (q1, q2),
                (q1.conjugate(), q2.conjugate()),
                (q1.conjugate(), q2),
                (q1, q2.conjugate()),
            ]
        )
    counts = galois_counts(D1, D2)
    if len(pairs) != counts.over_Q:
        LOGGER.warning(
            "cm.cycle_count",
            extra={"event": "cm.cycle_count", "pairs": len(pairs), "expected": counts.over_Q, "D1": D1, "D2": D2},
        )
    LOGGER.debug(
        "cm.cycle",
        extra={"event": "cm.cycle", "D1": D1, "D2": D2, "N": N, "classes": len(chosen)},
    )
    return CMCycle(D1, D2, N, tuple(pairs), len(chosen))


def _green_at_pair(k: int, terms: Any, N: int, cutoff: Any, pair: tuple[HeegnerPoint, HeegnerPoint]) -> GreenValue:
    return green_Gkf(k, terms, N, pair[0].tau, pair[1].tau, cutoff)


def green_on_cycle(
    k: int,
    principal: Iterable[tuple[int, Any]],
    N: int,
    cycle: CMCycle,
    cutoff: Any = 64,
    threads: int = 1,
) -> GreenValue:
    """sum over the cycle of G_{k,f}(z1, z2)."""
    terms = _check_principal_part(principal)
    parts = ordered_map(partial(_green_at_pair, k, terms, N, cutoff), cycle.pairs, threads)
    return GreenValue(
        mp.fsum(part.value for part in parts),
        mp.fsum(part.tail for part in parts),
        sum(part.terms for part in parts),
    )


@dataclass(frozen=True)
class NormCertificate:
    """The product over a CM cycle, its nearest integer and the integrality evidence."""

    N: int
    D1: int
    D2: int
    product: mp.mpc
    nearest: int
    distance: mp.mpf
    factors: dict[int, int]
    is_unit: bool
    bits: int
    pairs: int

    @property
    def product_log(self) -> mp.mpf:
        return mp.log(abs(self.product)) if self.product else mp.ninf

    def as_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "D1": self.D1,
            "D2": self.D2,
            "product_log": mp.nstr(self.product_log, 20),
            "nearest_integer": str(self.nearest),
            "distance": mp.nstr(self.distance, 5),
            "factors": {str(p): e for p, e in self.factors.items()},
            "is_unit": self.is_unit,
            "bits": self.bits,
            "pairs": self.pairs,
        }


def _pair_difference(f: Callable[[mp.mpc], mp.mpc], pair: tuple[HeegnerPoint, HeegnerPoint]) -> mp.mpc:
    return f(pair[0].tau) - f(pair[1].tau)


def _cycle_product(f: Callable[[mp.mpc], mp.mpc], cycle: CMCycle, threads: int) -> mp.mpc:
    differences = ordered_map(partial(_pair_difference, f), cycle.pairs, threads)
    return mp.fprod(differences)


def _magnitude_bits(value: mp.mpc) -> int:
    if value == 0:
        return 0
    return max(0, int(mp.ceil(mp.log(abs(value), 2))))


def cm_norm(
    N: int,
    D1: int,
    D2: int,
    bits: int | None = None,
    headroom: int = CM_HEADROOM_BITS,
    threads: int = 1,
    shift: int = 0,
) -> NormCertificate:
    """prod over the CM cycle of (f(z1) - f(z2)), f the hauptmodul of X_0(N) (j for N = 1).

    A first pass at ``bits`` estimates the size of the product; the evaluation
    is repeated at 2 (size + headroom) bits when that is larger.  The result must
    be real and within 2^(size - bits/2) of an integer, after one doubling retry.
    """
    f = hauptmodul_function(N)
    cycle = cm_cycle(D1, D2, N, shift)
    current = bits or CM_START_BITS
    with working_precision(current):
        estimate = _magnitude_bits(_cycle_product(f, cycle, threads))
    target = 2 * (estimate + headroom)
    if target > current:
        LOGGER.info(
            "cm.precision_retry",
            extra={"event": "cm.precision_retry", "from_bits": current, "to_bits": target},
        )
        current = target

    for attempt in range(2):
        with working_precision(current):
            product = _cycle_product(f, cycle, threads)
            nearest = int(mp.nint(mp.re(product)))
            distance = abs(product - nearest)
            limit = mp.power(2, _magnitude_bits(product) - current // 2)
            if distance < limit:
                certificate = NormCertificate(
                    N,
                    D1,
                    D2,
                    +product,
                    nearest,
                    +distance,
                    dict(factorization(nearest).pairs) if nearest else {},
                    abs(nearest) == 1,
                    current,
                    len(cycle),
                )
                LOGGER.debug(
                    "cm.norm",
                    extra={"event": "cm.norm", "N": N, "D1": D1, "D2": D2, "bits": current, "digits": len(str(nearest))},
                )
                return certificate
        LOGGER.warning(
            "cm.precision_retry",
            extra={"event": "cm.precision_retry", "from_bits": current, "to_bits": 2 * current, "attempt": attempt},
        )
        current *= 2
    raise IntegralityError(
        f"product over the ({N}, {D1}, {D2}) cycle is {mp.nstr(distance, 5)} away from an integer",
        distance=mp.nstr(distance, 5),
    )
