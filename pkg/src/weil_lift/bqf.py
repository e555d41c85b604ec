"""Binary quadratic forms: reduction, composition, class groups, genus characters.

Forms are written ``[a, b, c]`` for ``a x^2 + b x y + c y^2``.  Matrices act on the
right, ``(f o g)(x, y) = f(g (x, y))``, so ``f o (g h) = (f o g) o h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
import logging
from math import gcd, isqrt

import mpmath as mp

from .exceptions import ClassEnumerationError, InputValidationError, WeilLiftError
from .numtheory import (
    IDENTITY,
    S_MATRIX,
    Matrix2,
    divisors,
    heegner_condition,
    is_fundamental,
    is_square,
    kronecker,
    lift_coprime,
    mat_inv,
    mat_mul,
    mat_neg,
    p1_normalize,
    p1_points,
    translation,
    xgcd,
)

LOGGER = logging.getLogger(__name__)

GENUS_SEARCH_RADIUS = 50
MAX_INDEFINITE_DISC = 10**7


@dataclass(frozen=True, order=True)
class BQF:
    """Integral binary quadratic form [a, b, c]."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive_part(self) -> BQF:
        g = self.content
        if g == 0:
            raise InputValidationError("the zero form has no primitive part")
        return BQF(self.a // g, self.b // g, self.c // g)

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, g: Matrix2) -> BQF:
        """Right action f o g."""
        (p, q), (r, s) = g
        return BQF(
            self(p, r),
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self(q, s),
        )

    def negate(self) -> BQF:
        return BQF(-self.a, -self.b, -self.c)

    def conjugate(self) -> BQF:
        """The form [a, -b, c]; on Heegner points this is tau -> -conj(tau)."""
        return BQF(self.a, -self.b, self.c)

    def value_at(self, z: mp.mpc) -> mp.mpc:
        return (self.a * z + self.b) * z + self.c

    def roots(self) -> tuple[mp.mpf, mp.mpf]:
        """Real roots (w_plus, w_minus) = ((-b + sqrt D)/2a, (-b - sqrt D)/2a) for D > 0, a != 0."""
        D = self.disc
        if D <= 0 or self.a == 0:
            raise InputValidationError(f"{self} has no pair of finite real roots")
        root = mp.sqrt(D)
        return (-self.b + root) / (2 * self.a), (-self.b - root) / (2 * self.a)

    def as_dict(self) -> dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c}

    def __str__(self) -> str:
        return f"[{self.a},{self.b},{self.c}]"


def _require_definite(f: BQF) -> None:
    if f.disc >= 0 or f.a <= 0:
        raise InputValidationError(f"{f} is not positive definite")


def is_reduced(f: BQF) -> bool:
    """Reduced positive definite: |b| <= a <= c, and b >= 0 if |b| = a or a = c."""
    if not (abs(f.b) <= f.a <= f.c):
        return False
    if (abs(f.b) == f.a or f.a == f.c) and f.b < 0:
        return False
    return True


def reduce(f: BQF) -> tuple[BQF, Matrix2]:
    """Reduce a positive definite form; returns (g, gamma) with g = f o gamma."""
    _require_definite(f)
    gamma = IDENTITY
    g = f
    while True:
        t = (g.a - g.b) // (2 * g.a)
        if t:
            step = translation(t)
            g, gamma = g.act(step), mat_mul(gamma, step)
        if g.a > g.c or (g.a == g.c and g.b < 0):
            g, gamma = g.act(S_MATRIX), mat_mul(gamma, S_MATRIX)
            continue
        return g, gamma


def compose(f: BQF, g: BQF) -> BQF:
    """Dirichlet composition of primitive forms of equal discriminant (unreduced)."""
    D = f.disc
    if g.disc != D:
        raise InputValidationError(f"cannot compose {f} and {g}: discriminants differ")
    beta = (f.b + g.b) // 2
    g1, x1, y1 = xgcd(f.a, g.a)
    e, x2, y2 = xgcd(g1, beta)
    u, v, w = x2 * x1, x2 * y1, y2
    A = f.a * g.a // (e * e)
    B = (u * f.a * g.b + v * g.a * f.b + w * (f.b * g.b + D) // 2) // e
    B %= 2 * A
    if B > A:
        B -= 2 * A
    numerator = B * B - D
    if numerator % (4 * A):
        raise WeilLiftError(f"composition of {f} and {g} failed to close")
    return BQF(A, B, numerator // (4 * A))


@dataclass(frozen=True)
class ClassGroup:
    """Reduced primitive forms of a negative discriminant with their composition table."""

    discriminant: int
    forms: tuple[BQF, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.forms)

    @property
    def identity(self) -> BQF:
        return self.forms[0]

    def index(self, f: BQF) -> int:
        reduced, _ = reduce(f)
        try:
            return self.forms.index(reduced)
        except ValueError as exc:
            raise InputValidationError(f"{f} is not a primitive form of disc {self.discriminant}") from exc

    def multiply(self, f: BQF, g: BQF) -> BQF:
        return self.forms[self.table[self.index(f)][self.index(g)]]

    def inverse(self, f: BQF) -> BQF:
        return reduce(f.conjugate())[0]

    def power(self, f: BQF, n: int) -> BQF:
        result = self.identity
        base = f if n >= 0 else self.inverse(f)
        for _ in range(abs(n)):
            result = self.multiply(result, base)
        return result


def reduced_forms(D: int, primitive_only: bool = True) -> list[BQF]:
    """All reduced positive definite forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise InputValidationError(f"{D} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            numerator = b * b - D
            if numerator % (4 * a):
                continue
            f = BQF(a, b, numerator // (4 * a))
            if is_reduced(f) and (not primitive_only or f.is_primitive):
                forms.append(f)
        a += 1
    return sorted(forms, key=lambda f: (f.a, abs(f.b), -f.b))


@cache
def class_group(D: int) -> ClassGroup:
    if D >= 0 or not is_fundamental(D):
        raise InputValidationError(f"class_group needs a negative fundamental discriminant, got {D}")
    forms = tuple(reduced_forms(D))
    position = {f: i for i, f in enumerate(forms)}
    table = tuple(
        tuple(position[reduce(compose(f, g))[0]] for g in forms) for f in forms
    )
    LOGGER.debug(
        "bqf.class_group",
        extra={"event": "bqf.class_group", "disc": D, "class_number": len(forms)},
    )
    return ClassGroup(D, forms, table)


def class_number(D: int) -> int:
    return class_group(D).order


def _search_points(radius: int):
    yield (1, 0)
    yield (0, 1)
    for r in range(1, radius + 1):
        for x in range(-r, r + 1):
            for y in (-r, r) if abs(x) < r else range(-r, r + 1):
                if y < 0 or (y == 0 and x < 0) or gcd(x, y) != 1:
                    continue
                yield (x, y)


def genus_char(delta: int, f: BQF) -> int:
    """Generalized genus character chi_delta on a form whose discriminant delta divides.

    Value 0 exactly when gcd(a, b, c, delta) > 1; otherwise the Kronecker symbol
    (delta/n) for a represented n coprime to delta.
    """
    D = f.disc
    if delta == 0 or D % delta:
        raise InputValidationError(f"{delta} does not divide disc {D} of {f}")
    if not is_fundamental(delta):
        raise InputValidationError(f"{delta} is not a fundamental discriminant")
    if (D // delta) % 4 not in (0, 1):
        raise InputValidationError(f"{D}/{delta} is not a discriminant")
    if delta == 1:
        return 1
    if gcd(f.content, delta) > 1:
        return 0
    for x, y in _search_points(GENUS_SEARCH_RADIUS):
        n = f(x, y)
        if n and gcd(n, delta) == 1:
            return kronecker(delta, n)
    raise WeilLiftError(f"no value of {f} coprime to {delta} within |x|,|y| <= {GENUS_SEARCH_RADIUS}")


def prime_discriminant(p: int) -> int:
    """p* = (-1)^((p-1)/2) p for an odd prime p."""
    if p % 2 == 0:
        raise InputValidationError("prime discriminants are only used for odd p")
    return p if p % 4 == 1 else -p


def genus_char_prime(p: int, f: BQF) -> int:
    """The prime-discriminant character chi_{p*} on f, for an odd prime p dividing disc(f)."""
    return genus_char(prime_discriminant(p), f)


@dataclass(frozen=True)
class HeegnerPoint:
    """CM point of X_0(N) attached to a form [N A, B, C] with B = beta mod 2N."""

    form: BQF
    level: int
    beta: int

    @property
    def discriminant(self) -> int:
        return self.form.disc

    @property
    def tau(self) -> mp.mpc:
        D = self.form.disc
        return mp.mpc(-self.form.b, mp.sqrt(-D)) / (2 * self.form.a)

    def conjugate(self) -> HeegnerPoint:
        """The point -conj(tau), attached to [a, -b, c] and the branch -beta."""
        return HeegnerPoint(self.form.conjugate(), self.level, (-self.beta) % (2 * self.level))


def heegner_beta(D: int, N: int) -> int:
    """Least beta >= 0 with beta^2 = D mod 4N."""
    for beta in range(2 * N):
        if (beta * beta - D) % (4 * N) == 0:
            return beta
    raise InputValidationError(f"D={D} is not a square mod {4 * N}")


@cache
def heegner_points(D: int, N: int, beta: int | None = None) -> tuple[HeegnerPoint, ...]:
    """One Heegner point per class of Cl(D), in the order of ``class_group(D).forms``."""
    if D >= 0 or not is_fundamental(D):
        raise InputValidationError(f"Heegner points need a negative fundamental discriminant, got {D}")
    if not heegner_condition(D, N):
        raise InputValidationError(f"D={D} fails the Heegner condition at level {N}")
    if beta is None:
        beta = heegner_beta(D, N)
    elif (beta * beta - D) % (4 * N):
        raise InputValidationError(f"beta={beta} does not satisfy beta^2 = D mod 4N")
    group = class_group(D)
    found: dict[int, BQF] = {}
    A = 1
    while len(found) < group.order:
        a = N * A
        for B in range(-a + 1, a + 1):
            if (B - beta) % (2 * N) or (B * B - D) % (4 * a):
                continue
            f = BQF(a, B, (B * B - D) // (4 * a))
            if not f.is_primitive:
                continue
            found.setdefault(group.index(f), f)
        A += 1
        if A > 10 * (group.order + 1) * (-D):
            raise ClassEnumerationError(f"Heegner form search for D={D}, N={N} did not close")
    return tuple(HeegnerPoint(found[i], N, beta) for i in range(group.order))


def galois_conjugate(point: HeegnerPoint, sigma: BQF) -> HeegnerPoint:
    """Heegner point of the class [form(point)] * sigma^(-1), same branch beta."""
    D = point.discriminant
    if sigma.disc != D:
        raise InputValidationError(f"{sigma} has discriminant {sigma.disc}, expected {D}")
    group = class_group(D)
    target = group.multiply(point.form, group.inverse(sigma))
    for candidate in heegner_points(D, point.level, point.beta):
        if group.index(candidate.form) == group.index(target):
            return candidate
    raise WeilLiftError(f"no Heegner point in the class of {target}")


def heegner_class(point: HeegnerPoint) -> BQF:
    return reduce(point.form)[0]


# Indefinite forms


def is_reduced_indefinite(f: BQF) -> bool:
    """Gauss reduced: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b."""
    D = f.disc
    if D <= 0 or is_square(D):
        return False
    if not (0 < f.b and f.b * f.b < D):
        return False
    two_a = 2 * abs(f.a)
    lower_ok = (two_a + f.b) ** 2 > D
    upper_ok = two_a - f.b < 0 or (two_a - f.b) ** 2 < D
    return lower_ok and upper_ok


def rho_step(f: BQF) -> tuple[BQF, Matrix2]:
    """One step of the reduction operator; returns (g, gamma) with g = f o gamma."""
    D = f.disc
    root = isqrt(D)
    two_c = 2 * abs(f.c)
    b_next = root - ((root + f.b) % two_c)
    s = (f.b + b_next) // (2 * f.c)
    gamma = ((0, -1), (1, s))
    g = f.act(gamma)
    return g, gamma


def reduce_indefinite(f: BQF) -> tuple[BQF, Matrix2]:
    """Move an indefinite form of non-square discriminant to a reduced one."""
    D = f.disc
    if D <= 0 or is_square(D):
        raise InputValidationError(f"{f} is not indefinite with non-square discriminant")
    gamma = IDENTITY
    g = f
    steps = 0
    while not is_reduced_indefinite(g):
        g, step = rho_step(g)
        gamma = mat_mul(gamma, step)
        steps += 1
        if steps > 10_000:
            raise ClassEnumerationError(f"indefinite reduction of {f} did not terminate")
    return g, gamma


def reduced_cycle(f: BQF) -> tuple[tuple[BQF, ...], Matrix2]:
    """The rho-cycle of the reduced form equivalent to f, with the cycle's automorph.

    The automorph is written for the first form of the returned cycle.
    """
    start, _ = reduce_indefinite(f)
    cycle = [start]
    product = IDENTITY
    g = start
    while True:
        g, step = rho_step(g)
        product = mat_mul(product, step)
        if g == start:
            break
        cycle.append(g)
        if len(cycle) > 100_000:
            raise ClassEnumerationError(f"cycle of {f} is too long")
    return tuple(cycle), product


def _automorph_from_tu(f: BQF, t: int, u: int) -> Matrix2:
    return (((t + f.b * u) // 2, f.c * u), (-f.a * u, (t - f.b * u) // 2))


def pell_automorph(f: BQF) -> Matrix2:
    """Generator [[(t+bu)/2, cu], [-au, (t-bu)/2]] of the proper automorphs of f, t, u > 0.

    (t, u) is the fundamental solution of t^2 - D u^2 = 4 for the discriminant D of the
    primitive part of f (the stabilizer of f and of its primitive part coincide).
    """
    D = f.disc
    if D <= 0 or is_square(D):
        raise InputValidationError(f"pell_automorph needs a positive non-square discriminant, got {D}")
    g = f.primitive_part()
    reduced, gamma = reduce_indefinite(g)
    cycle, product = reduced_cycle(reduced)
    if cycle[0] != reduced:
        raise WeilLiftError("reduced cycle does not start at the reduced form")
    M = mat_mul(mat_mul(gamma, product), mat_inv(gamma))
    t = M[0][0] + M[1][1]
    if t < 0:
        M = mat_neg(M)
        t = -t
    u = -M[1][0] // g.a if g.a else M[0][1] // g.c
    if u < 0:
        u = -u
    if g.act(_automorph_from_tu(g, t, u)) != g or t * t - g.disc * u * u != 4:
        raise WeilLiftError(f"automorph of {f} failed verification")
    return _automorph_from_tu(g, t, u)


def gamma0_automorph(f: BQF, N: int) -> Matrix2:
    """Least positive power of ``pell_automorph(f)`` lying in Gamma_0(N)."""
    M = pell_automorph(f)
    power = M
    while power[1][0] % N:
        power = mat_mul(power, M)
    return power


def pell_solution(f: BQF) -> tuple[int, int]:
    """(t, u) of ``pell_automorph(f)``."""
    M = pell_automorph(f)
    g = f.primitive_part()
    u = -M[1][0] // g.a if g.a else M[0][1] // g.c
    return M[0][0] + M[1][1], u


def _sl2_class_reps_nonsquare(D: int) -> list[BQF]:
    root = isqrt(D)
    reduced: set[BQF] = set()
    for b in range(1, root + 1):
        if (b - D) % 2:
            continue
        n = (D - b * b) // 4
        for a_abs in divisors(n):
            for a in (a_abs, -a_abs):
                f = BQF(a, b, -n // a)
                if is_reduced_indefinite(f):
                    reduced.add(f)
    reps = []
    while reduced:
        first = min(reduced)
        cycle, _ = reduced_cycle(first)
        reduced.difference_update(cycle)
        reps.append(min(cycle))
    return sorted(reps)


@cache
def indefinite_classes(D: int) -> tuple[BQF, ...]:
    """SL_2(Z)-class representatives of all forms (primitive or not) of discriminant D > 0.

    Non-square D: the least form of each reduced cycle.  Square D = f^2: the forms
    [0, f, C] with 0 <= C < f.
    """
    if D <= 0 or D % 4 not in (0, 1):
        raise InputValidationError(f"{D} is not a positive discriminant")
    if D > MAX_INDEFINITE_DISC:
        raise ClassEnumerationError(f"discriminant {D} exceeds the enumeration cap {MAX_INDEFINITE_DISC}")
    if is_square(D):
        f = isqrt(D)
        return tuple(BQF(0, f, C) for C in range(f))
    return tuple(_sl2_class_reps_nonsquare(D))


def root_orbits(Q: BQF, N: int) -> list[tuple[tuple[int, int], ...]]:
    """Roots of Q on P^1(Z/N), grouped into orbits of the automorph group of Q.

    Each orbit is sorted and the orbits are ordered by their least point.  For
    imprimitive Q with p | gcd(content, N) the automorph can move roots.
    """
    roots = [point for point in p1_points(N) if Q(*point) % N == 0]
    if is_square(Q.disc):
        return [(point,) for point in roots]
    (p, q), (r, s) = pell_automorph(Q)
    orbits = []
    seen: set[tuple[int, int]] = set()
    for point in roots:
        if point in seen:
            continue
        orbit = []
        x, y = point
        while (x, y) not in orbit:
            orbit.append((x, y))
            x, y = p1_normalize(p * x + q * y, r * x + s * y, N)
        seen.update(orbit)
        orbits.append(tuple(sorted(orbit)))
    return orbits


def gamma0_classes(D: int, N: int) -> tuple[BQF, ...]:
    """One form [A, B, C] with N | A for every Gamma_0(N)-class of discriminant D > 0.

    Within an SL_2-class of Q these classes correspond to the orbits of the
    automorphs of Q on the roots of Q mod N in P^1(Z/N).
    """
    if N < 1:
        raise InputValidationError(f"level must be positive, got {N}")
    if N > 1 and N % 2 == 0:
        raise InputValidationError("even levels are not supported for Gamma_0(N)-classes")
    result = []
    for Q in indefinite_classes(D):
        if N == 1:
            result.append(Q)
            continue
        for orbit in root_orbits(Q, N):
            c, d = lift_coprime(*orbit[0], N)
            _, X, Y = xgcd(c, d)
            gamma = ((c, -Y), (d, X))
            if gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0] != 1:
                raise WeilLiftError("failed to complete a Gamma_0 coset representative")
            rep = Q.act(gamma)
            if rep.a % N:
                raise WeilLiftError(f"representative {rep} does not have N | a")
            result.append(rep)
    LOGGER.debug(
        "bqf.gamma0_classes",
        extra={"event": "bqf.gamma0_classes", "disc": D, "level": N, "count": len(result)},
    )
    return tuple(result)
