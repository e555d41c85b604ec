"""Exact integer primitives and elementary arithmetic functions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
import logging
from math import gcd, isqrt, prod

import mpmath as mp
from sympy import factorint

from .exceptions import InputValidationError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Factorization:
    """Prime-exponent pairs of a positive integer, primes increasing."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        return prod(p**e for p, e in self.pairs)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def as_dict(self) -> dict[str, int]:
        return {str(p): e for p, e in self.pairs}


@dataclass(frozen=True)
class Discriminant:
    """A fundamental discriminant (the value 1 is admitted as the trivial one)."""

    value: int

    def __post_init__(self) -> None:
        if not is_fundamental(self.value):
            raise InputValidationError(f"{self.value} is not a fundamental discriminant")

    @property
    def is_odd(self) -> bool:
        return self.value % 2 != 0

    def __int__(self) -> int:
        return self.value


def factorization(n: int) -> Factorization:
    """Factor ``|n|`` with sympy; the result for 1 is the empty product."""
    if n == 0:
        raise InputValidationError("cannot factor 0")
    return Factorization(tuple(sorted(factorint(abs(n)).items())))


@cache
def prime_divisors(n: int) -> tuple[int, ...]:
    if n == 0:
        raise InputValidationError("0 has no finite set of prime divisors")
    return tuple(sorted(factorint(abs(n))))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def divisors(n: int) -> list[int]:
    if n < 1:
        raise InputValidationError(f"divisors need n >= 1, got {n}")
    result = [1]
    for p, e in factorint(n).items():
        result = [d * p**k for d in result for k in range(e + 1)]
    return sorted(result)


def sigma(k: int, n: int) -> int:
    return sum(d**k for d in divisors(n))


def sigma1(n: int) -> int:
    return sigma(1, n)


def omega(n: int) -> int:
    if n < 1:
        raise InputValidationError(f"omega needs n >= 1, got {n}")
    return len(factorint(n))


def moebius(n: int) -> int:
    exps = factorint(n).values()
    if any(e > 1 for e in exps):
        return 0
    return -1 if len(exps) % 2 else 1


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise InputValidationError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n), completely multiplicative in n."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v2 = (n & -n).bit_length() - 1
    if v2:
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5) and v2 % 2 == 1:
            result = -result
        n >>= v2
    if n == 1:
        return result
    return result * jacobi(D, n)


def is_fundamental(D: int) -> bool:
    if D in (0,):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_part(D: int) -> tuple[int, int]:
    """Split a discriminant as D = D0 * f^2 with D0 fundamental and f >= 1."""
    if D == 0 or D % 4 not in (0, 1):
        raise InputValidationError(f"{D} is not a discriminant")
    f = 1
    for p, e in factorint(abs(D)).items():
        f *= p ** (e // 2)
    D0 = D // (f * f)
    while D0 % 4 not in (0, 1) or not is_fundamental(D0):
        # the 2-part needs adjusting: D0 = 4m with m = 1 mod 4 is not fundamental
        if f % 2 == 0 and D0 % 4 in (2, 3):
            f //= 2
            D0 *= 4
        else:
            raise InputValidationError(f"cannot split {D} into fundamental times square")
    return D0, f


def heegner_condition(D: int, N: int) -> bool:
    """True iff every prime dividing N splits in the order of discriminant D."""
    if N < 1 or not is_squarefree(N):
        raise InputValidationError(f"level {N} must be a positive squarefree integer")
    return all(kronecker(D, p) == 1 for p in prime_divisors(N)) if N > 1 else True


def partial_zeta(N: int, s: int | Fraction | complex | mp.mpf | mp.mpc) -> Fraction | mp.mpc:
    """Euler factors of zeta at the primes dividing N.

    Integer arguments stay exact (a Fraction); anything else is evaluated at the
    current mpmath precision.
    """
    if N < 1:
        raise InputValidationError(f"level must be positive, got {N}")
    primes = prime_divisors(N) if N > 1 else ()
    if isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1):
        e = int(s)
        result = Fraction(1)
        for p in primes:
            local = 1 - Fraction(p) ** (-e)
            if local == 0:
                raise InputValidationError(f"partial zeta has a pole at s={s} (p={p})")
            result /= local
        return result
    value = mp.mpmathify(s) if not isinstance(s, Fraction) else mp.mpf(s.numerator) / s.denominator
    result_mp = mp.mpc(1)
    for p in primes:
        local = 1 - mp.power(p, -value)
        if abs(local) < mp.eps * 16:
            raise InputValidationError(f"partial zeta has a pole at s={s} (p={p})")
        result_mp /= local
    return result_mp


def gamma_R(s: mp.mpc | mp.mpf | complex | float) -> mp.mpc:
    """Gamma_R(s) = pi^(-s/2) Gamma(s/2)."""
    s = mp.mpmathify(s)
    return mp.power(mp.pi, -s / 2) * mp.gamma(s / 2)


def gamma_R_ratio(s: mp.mpc | mp.mpf | complex | float, r: int) -> mp.mpc:
    """Gamma_R(s+2r)/Gamma_R(s) as the finite product s(s+2)...(s+2r-2)/(2 pi)^r."""
    if r < 0:
        raise InputValidationError(f"r must be nonnegative, got {r}")
    s = mp.mpmathify(s)
    result = mp.mpf(1)
    for j in range(r):
        result *= s + 2 * j
    return result / (2 * mp.pi) ** r


def psi_index(N: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z)."""
    result = Fraction(N)
    for p in prime_divisors(N) if N > 1 else ():
        result *= Fraction(p + 1, p)
    return int(result)


def units_mod(N: int) -> list[int]:
    return [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [1]


def p1_normalize(c: int, d: int, N: int) -> tuple[int, int]:
    """Canonical representative of (c : d) in P^1(Z/N): least pair over unit scalings."""
    if N == 1:
        return (0, 0)
    return min(((u * c) % N, (u * d) % N) for u in units_mod(N))


@cache
def p1_points(N: int) -> tuple[tuple[int, int], ...]:
    """All points of the projective line over Z/N, one canonical pair each."""
    if N == 1:
        return ((0, 0),)
    seen = {
        p1_normalize(c, d, N)
        for c in range(N)
        for d in range(N)
        if gcd(gcd(c, d), N) == 1
    }
    return tuple(sorted(seen))


def lift_coprime(c: int, d: int, N: int) -> tuple[int, int]:
    """Integers (c', d') congruent to (c, d) mod N with gcd(c', d') = 1."""
    if N == 1:
        return (0, 1)
    c %= N
    d %= N
    if c == 0:
        c = N
    for t in range(0, 10 * N * c + 1):
        if gcd(c, d + t * N) == 1:
            return (c, d + t * N)
    raise InputValidationError(f"no coprime lift of ({c}:{d}) mod {N}")


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return (-a, -x0, -y0)
    return (a, x0, y0)


def complete_sl2(c: int, d: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """A matrix [[a, b], [c, d]] in SL_2(Z) with the given coprime bottom row."""
    g, x, y = xgcd(d, -c)
    if g != 1:
        raise InputValidationError(f"bottom row ({c}, {d}) is not primitive")
    return ((x, y), (c, d))


def relative_character(D1: int, D2: int, p: int) -> int:
    """Quadratic character of Q(sqrt D1, sqrt D2) over Q(sqrt D1 D2) at a prime above p.

    Computed from residue degrees: the prime of the quadratic subfield splits in
    the biquadratic field iff the residue degrees over p agree.
    """
    if (D1 * D2) % p == 0:
        raise InputValidationError(f"p={p} ramifies in the biquadratic field")
    chi1, chi2 = kronecker(D1, p), kronecker(D2, p)
    degree_K = 1 if chi1 == chi2 == 1 else 2
    degree_F = 1 if chi1 * chi2 == 1 else 2
    return 1 if degree_K == degree_F else -1


def chi_on_prime(D1: int, D2: int, p: int, which: int = 1) -> int:
    """chi_i evaluated on the norm of a prime of Q(sqrt D1 D2) above p."""
    degree_F = 1 if kronecker(D1, p) * kronecker(D2, p) == 1 else 2
    return kronecker(D1 if which == 1 else D2, p**degree_F)


Matrix2 = tuple[tuple[int, int], tuple[int, int]]

IDENTITY: Matrix2 = ((1, 0), (0, 1))
S_MATRIX: Matrix2 = ((0, -1), (1, 0))


def mat_mul(x: Matrix2, y: Matrix2) -> Matrix2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def mat_inv(x: Matrix2) -> Matrix2:
    """Inverse of a determinant-one integer matrix."""
    return ((x[1][1], -x[0][1]), (-x[1][0], x[0][0]))


def mat_neg(x: Matrix2) -> Matrix2:
    return ((-x[0][0], -x[0][1]), (-x[1][0], -x[1][1]))


def mat_det(x: Matrix2) -> int:
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def translation(t: int) -> Matrix2:
    return ((1, t), (0, 1))


def act_on_point(x: Matrix2, z: mp.mpc) -> mp.mpc:
    return (x[0][0] * z + x[0][1]) / (x[1][0] * z + x[1][1])
