"""Invariant vectors for the Weil representation on symmetric 2x2 matrices mod |D|."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from itertools import product
import logging

import mpmath as mp
import numpy as np

from ..bqf import BQF, genus_char, prime_discriminant
from ..exceptions import InputValidationError, WeilLiftError
from ..numtheory import is_fundamental, kronecker, prime_divisors
from .module import Element, FiniteQuadraticModule, IsotropicSubgroup, WeilVector, induce

LOGGER = logging.getLogger(__name__)

SMALL_PRIME_LIMIT = 7

Matrix2 = tuple[tuple[int, int], tuple[int, int]]


@cache
def sym2(n: int, scale: int = 1) -> FiniteQuadraticModule:
    """Symmetric matrices [[a, m], [m, b]] mod n, coordinates (a, b, m), Q = scale * det / n."""
    if n < 3 or n % 2 == 0:
        raise InputValidationError(f"Sym_2 modules are built for odd n >= 3, got {n}")
    s = Fraction(scale, n)
    gram = [[0, s, 0], [s, 0, 0], [0, 0, -2 * s]]
    relations = [[n, 0, 0], [0, n, 0], [0, 0, n]]
    return FiniteQuadraticModule(gram, relations, name=f"Sym2(Z/{n})")


def _as_form(mu: Element) -> BQF:
    a, b, m = mu
    return BQF(a, 2 * m, b)


def _check_discriminant(delta: int) -> None:
    if delta % 2 == 0:
        raise InputValidationError(f"even discriminant {delta} is not supported for u_K")
    if not is_fundamental(delta) or delta == 1:
        raise InputValidationError(f"{delta} is not a nontrivial fundamental discriminant")


def uK_value(delta: int, mu: Element) -> int:
    """chi_delta([a, 2m, b]) when delta | det(mu), else 0."""
    a, b, m = mu
    if (a * b - m * m) % delta:
        return 0
    return genus_char(delta, _as_form(mu))


def fundamental_invariant_uK(delta: int, scale: int = 1) -> WeilVector:
    """The invariant vector u_K on Sym2(Z/|delta|) for an odd fundamental discriminant.

    ``scale`` is a unit mod |delta| multiplying the quadratic form; the support and
    values do not depend on it.
    """
    _check_discriminant(delta)
    module = sym2(abs(delta), scale)
    vector = WeilVector.from_function(module, lambda mu: uK_value(delta, mu))
    LOGGER.debug(
        "weil.uK",
        extra={"event": "weil.uK", "disc": delta, "support": len(vector.support())},
    )
    return vector


def orthogonal_image(h: Matrix2, mu: Element, n: int) -> Element:
    """h mu h^T / det h on Sym2(Z/n)."""
    (p, q), (r, s) = h
    det = (p * s - q * r) % n
    try:
        inv = pow(det, -1, n)
    except ValueError as exc:
        raise InputValidationError(f"{h} is not invertible mod {n}") from exc
    a, b, m = mu
    top = a * p * p + 2 * m * p * q + b * q * q
    bottom = a * r * r + 2 * m * r * s + b * s * s
    cross = a * p * r + m * (p * s + q * r) + b * q * s
    return ((top * inv) % n, (bottom * inv) % n, (cross * inv) % n)


def orthogonal_action(h: Matrix2, v: WeilVector) -> WeilVector:
    """Push-forward of v along mu -> h mu h^T / det h."""
    n = v.module.diagonal[0]
    values: dict[Element, mp.mpc] = {}
    for mu, value in v.values.items():
        image = v.module.reduce(orthogonal_image(h, mu, n))
        values[image] = values.get(image, mp.mpc(0)) + value
    return WeilVector(v.module, values)


def _require_small_prime(p: int, limit: int | None = None) -> None:
    if p < 3 or prime_divisors(p) != (p,):
        raise InputValidationError(f"an odd prime is required, got {p}")
    if limit is not None and p > limit:
        raise InputValidationError(f"brute force over GL_2(F_{p}) is limited to p <= {limit}")


def gl2(p: int) -> list[Matrix2]:
    return [
        ((a, b), (c, d))
        for a, b, c, d in product(range(p), repeat=4)
        if (a * d - b * c) % p
    ]


def legendre(p: int) -> Callable[[int], int]:
    return lambda x: kronecker(x, p)


def isotypic_projection(p: int, chi: Callable[[int], int] | None = None) -> np.ndarray:
    """Matrix of sum_h chi(det h)^(-1) h acting on C[Sym2(F_p)], columns indexed by elements."""
    _require_small_prime(p, limit=11)
    chi = chi or legendre(p)
    module = sym2(p)
    elements = module.elements()
    position = {mu: i for i, mu in enumerate(elements)}
    matrix = np.zeros((len(elements), len(elements)))
    for h in gl2(p):
        weight = chi((h[0][0] * h[1][1] - h[0][1] * h[1][0]) % p)
        if not weight:
            continue
        for mu in elements:
            matrix[position[orthogonal_image(h, mu, p)], position[mu]] += weight
    return matrix


def isotypic_dimension(
    p: int, chi: Callable[[int], int] | None = None
) -> tuple[int, WeilVector]:
    """Rank of the chi-isotypic projection on C[Sym2(F_p)] and a spanning vector.

    With the Legendre character the spanning vector is proportional to u_K for
    the prime discriminant p*.
    """
    matrix = isotypic_projection(p, chi)
    rank = int(np.linalg.matrix_rank(matrix))
    module = sym2(p)
    elements = module.elements()
    column = int(np.argmax(np.linalg.norm(matrix, axis=0)))
    values = matrix[:, column]
    basis = WeilVector(
        module,
        {mu: mp.mpc(float(x)) for mu, x in zip(elements, values) if abs(x) > 1e-9},
    )
    LOGGER.debug(
        "weil.isotypic",
        extra={"event": "weil.isotypic", "prime": p, "rank": rank},
    )
    return rank, basis


def proportionality_defect(v: WeilVector, w: WeilVector) -> mp.mpf:
    """Norm of the component of v orthogonal to w, relative to ||v||."""
    ww = w.inner(w)
    if ww == 0 or v.norm() == 0:
        raise InputValidationError("proportionality needs two nonzero vectors")
    projection = v - w.scaled(v.inner(w) / ww)
    return projection.norm() / v.norm()


@dataclass
class Key2Report:
    """Outcome of the brute-force orbit/stabilizer check on Sym2(F_p)."""

    prime: int
    orbit_size: int
    isotropic_count: int
    counterexamples: list[Element] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.counterexamples and self.orbit_size == self.isotropic_count


def key2_bruteforce(p: int) -> Key2Report:
    """For nonzero mu in Sym2(F_p) check: det mu = 0 iff mu lies in the orbit of diag(1, 0)
    iff the stabilizer of mu has square determinants only."""
    _require_small_prime(p, limit=SMALL_PRIME_LIMIT)
    module = sym2(p)
    group = gl2(p)
    ell = (1, 0, 0)
    orbit = {orthogonal_image(h, ell, p) for h in group}
    counterexamples = []
    isotropic = 0
    for mu in module.elements():
        if mu == module.zero:
            continue
        is_isotropic = (mu[0] * mu[1] - mu[2] * mu[2]) % p == 0
        isotropic += is_isotropic
        in_orbit = mu in orbit
        stabilizer_in_kernel = all(
            kronecker((h[0][0] * h[1][1] - h[0][1] * h[1][0]) % p, p) == 1
            for h in group
            if orthogonal_image(h, mu, p) == mu
        )
        if not is_isotropic == in_orbit == stabilizer_in_kernel:
            counterexamples.append(mu)
    report = Key2Report(p, len(orbit), isotropic, counterexamples)
    LOGGER.debug(
        "weil.key2",
        extra={
            "event": "weil.key2",
            "prime": p,
            "orbit": report.orbit_size,
            "counterexamples": len(counterexamples),
        },
    )
    return report


def uK_projective_form(p: int) -> WeilVector:
    """sum over lines L of P^1(F_p) and square classes e of chi(e) sum_{v in L, v != 0} e_{e v v^T}.

    Equals 2 u_K for the prime discriminant p*.
    """
    _require_small_prime(p)
    module = sym2(p)
    nonresidue = next(x for x in range(2, p) if kronecker(x, p) == -1)
    lines = [(1, c) for c in range(p)] + [(0, 1)]
    values: dict[Element, mp.mpc] = {}
    for eps in (1, nonresidue):
        sign = kronecker(eps, p)
        for a0, c0 in lines:
            for t in range(1, p):
                a, c = a0 * t, c0 * t
                mu = module.reduce((eps * a * a, eps * c * c, eps * a * c))
                values[mu] = values.get(mu, mp.mpc(0)) + sign
    return WeilVector(module, values)


def uK_prime_discriminant(p: int) -> WeilVector:
    return fundamental_invariant_uK(prime_discriminant(p))


def diagonal_subgroup(
    A0: FiniteQuadraticModule, sign: int
) -> tuple[FiniteQuadraticModule, IsotropicSubgroup]:
    """A0 + (-A0) together with H = {(mu, sign mu)}."""
    if sign not in (1, -1):
        raise InputValidationError("sign must be +1 or -1")
    A = A0.direct_sum(A0.negated())
    r = A0.rank
    generators = []
    for i in range(r):
        unit = [0] * (2 * r)
        unit[i] = 1
        unit[r + i] = sign
        generators.append(unit)
    return A, IsotropicSubgroup(A, generators)


def w_pm(A0: FiniteQuadraticModule, sign: int) -> WeilVector:
    """w_sign(A0) = sum over mu of e_(mu, sign mu), induced from the trivial quotient."""
    A, H = diagonal_subgroup(A0, sign)
    if H.quotient.order != 1:
        raise WeilLiftError("diagonal subgroup is not maximal isotropic")
    return induce(H, WeilVector.basis(H.quotient, H.quotient.zero))


def random_orthogonal_elements(n: int, count: int, rng: np.random.Generator) -> list[Matrix2]:
    found: list[Matrix2] = []
    while len(found) < count:
        p, q, r, s = (int(x) for x in rng.integers(0, n, size=4))
        det = p * s - q * r
        if all(det % ell for ell in prime_divisors(n)):
            found.append(((p, q), (r, s)))
    return found


def random_vector(
    module: FiniteQuadraticModule,
    rng: np.random.Generator,
    elements: Sequence[Element] | None = None,
) -> WeilVector:
    elements = module.elements() if elements is None else elements
    re = rng.standard_normal(len(elements))
    im = rng.standard_normal(len(elements))
    return WeilVector(module, {x: mp.mpc(float(a), float(b)) for x, a, b in zip(elements, re, im)})
