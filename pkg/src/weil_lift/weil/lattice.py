"""The level-N invariant vector induced from u_K through an isotropic subgroup.

Elements of the ambient module are written as tuples (alpha, a, b, c, d) with
alpha = (r + s sqrt(D2)) / 2 in the ideal n2 = [N, (B + sqrt D2) / 2] and

    Q(alpha, a, b, c, d) = Nm(alpha) / (N^2 D2) - a b / (N D1) + c^2 / (4 D1) - d^2 / (4 D2),

subject to c D_F = d mod 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import logging
from math import gcd

import mpmath as mp

from ..bqf import heegner_beta
from ..exceptions import InputValidationError, WeilLiftError
from ..numtheory import heegner_condition, is_fundamental, is_squarefree
from .invariants import fundamental_invariant_uK
from .module import Element, FiniteQuadraticModule, IsotropicSubgroup, WeilVector

LOGGER = logging.getLogger(__name__)

EXTENSION_SEARCH_LIMIT = 200_000


@dataclass(frozen=True)
class LatticeData:
    D1: int
    D2: int
    N: int
    B: int
    B_prime: int

    @property
    def D(self) -> int:
        return self.D1 * self.D2


@dataclass
class PhiNConstruction:
    """The invariant vector together with the objects it was built from."""

    data: LatticeData
    module: FiniteQuadraticModule
    subgroup: IsotropicSubgroup
    iota_scale: int
    vector: WeilVector
    generators: list[Element] = field(default_factory=list)
    extensions: list[Element] = field(default_factory=list)

    @property
    def expected_h_order(self) -> int:
        return self.data.N**2 * abs(self.data.D2)


def _alpha_block(D2: int, N: int, B: int) -> FiniteQuadraticModule:
    scale = Fraction(1, N * N * D2)
    gram = [
        [2 * N * N * scale, N * B * scale],
        [N * B * scale, Fraction(B * B - D2, 2) * scale],
    ]
    return FiniteQuadraticModule.from_dual_gram(gram, name="alpha")


def _ab_block(D1: int, N: int) -> FiniteQuadraticModule:
    off = Fraction(-1, N * D1)
    return FiniteQuadraticModule.from_dual_gram([[0, off], [off, 0]], name="ab")


def _cd_block(D1: int, D2: int) -> FiniteQuadraticModule:
    if D2 % 2 == 0:
        gram = [[Fraction(1, 2 * D1), 0], [0, Fraction(-2, D2)]]
    else:
        gram = [
            [Fraction(D2 - D1, 2 * D1 * D2), Fraction(-1, D2)],
            [Fraction(-1, D2), Fraction(-2, D2)],
        ]
    return FiniteQuadraticModule.from_dual_gram(gram, name="cd")


def ambient_module(D1: int, D2: int, N: int, B: int) -> FiniteQuadraticModule:
    return _alpha_block(D2, N, B).direct_sum(_ab_block(D1, N)).direct_sum(_cd_block(D1, D2))


def coordinates(
    data: LatticeData, r: int, s: int, a: int, b: int, c: int, d: int
) -> tuple[int, ...]:
    """Module coordinates of the tuple with alpha = (r + s sqrt D2) / 2."""
    x, rem = divmod(r - s * data.B, 2 * data.N)
    if rem:
        raise InputValidationError(f"alpha = ({r} + {s} sqrt {data.D2})/2 is not in n2")
    if data.D2 % 2 == 0:
        if d % 2:
            raise InputValidationError("d must be even when D2 is even")
        u, v = c, d // 2
    else:
        if (d - c) % 2:
            raise InputValidationError("c and d must have the same parity when D2 is odd")
        u, v = c, (d - c) // 2
    return (x, s, a, b, u, v)


def _b_prime(D2: int, N: int, B: int) -> int:
    for t in range(2 * N):
        candidate = B + 2 * N * t
        if (candidate * candidate - D2) % (4 * N * N) == 0:
            return candidate
    raise WeilLiftError(f"no B' = {B} mod {2 * N} with B'^2 = {D2} mod {4 * N * N}")


def _validate(D1: int, D2: int, N: int) -> None:
    if D1 % 2 == 0 or not is_fundamental(D1) or D1 == 1:
        raise InputValidationError(f"D1 = {D1} must be an odd fundamental discriminant")
    if not is_fundamental(D2) or D2 == 1:
        raise InputValidationError(f"D2 = {D2} must be a fundamental discriminant")
    if D1 == D2:
        raise InputValidationError("D1 and D2 must differ")
    if N < 1 or not is_squarefree(N):
        raise InputValidationError(f"N = {N} must be a positive squarefree integer")
    if gcd(N, D1 * D2) != 1 or not (heegner_condition(D1, N) and heegner_condition(D2, N)):
        raise InputValidationError(f"N = {N} must split in both Q(sqrt {D1}) and Q(sqrt {D2})")


def _iota(data: LatticeData, mu: Element) -> tuple[int, ...]:
    a, b, m = mu
    n = abs(data.D1)
    b_prime = (b * pow(data.N, -1, n)) % n
    return coordinates(data, 0, 0, data.N * a, data.N * b_prime, 2 * m, 0)


def _extend_to_order(
    A: FiniteQuadraticModule,
    H: IsotropicSubgroup,
    iota_basis: list[Element],
    target: int,
) -> tuple[IsotropicSubgroup, list[Element]]:
    """Grow H by isotropic (alpha, 0, 0, c, d) orthogonal to H and to im(iota)."""
    added: list[Element] = []
    alpha_sizes = A.diagonal[:2]
    cd_sizes = A.diagonal[4:]
    checked = 0
    while H.order < target:
        found = None
        for x, y, u, v in product(*(range(k) for k in alpha_sizes + cd_sizes)):
            checked += 1
            if checked > EXTENSION_SEARCH_LIMIT:
                break
            candidate = A.reduce((x, y, 0, 0, u, v))
            if candidate in H or not A.is_isotropic(candidate) or not H.in_perp(candidate):
                continue
            if any(A.b_int(candidate, z) for z in iota_basis):
                continue
            found = candidate
            break
        if found is None:
            raise WeilLiftError(
                f"isotropic subgroup has order {H.order}, expected {target}, and no extension was found"
            )
        H = H.extended(found)
        added.append(found)
        LOGGER.debug(
            "weil.h_extension",
            extra={"event": "weil.h_extension", "generator": found, "order": H.order},
        )
    if H.order != target:
        raise WeilLiftError(f"isotropic subgroup has order {H.order}, expected {target}")
    return H, added


def construct_phiN(D1: int, D2: int, N: int) -> PhiNConstruction:
    """Build A, H and the vector induced from iota(u_K1), checking H^perp = H + im(iota)."""
    _validate(D1, D2, N)
    B = heegner_beta(D2, N)
    data = LatticeData(D1, D2, N, B, _b_prime(D2, N, B))
    A = ambient_module(D1, D2, N, B)
    expected = N**4 * abs(D1) ** 3 * D2 * D2
    if A.order != expected:
        raise WeilLiftError(f"|A| = {A.order}, expected N^4 |D1|^3 D2^2 = {expected}")

    generators = [coordinates(data, 2 * N * N, 0, 0, 0, 0, 2 * N)]
    if N > 1:
        Bp = data.B_prime
        generators.append(coordinates(data, Bp * D2, D2, D1, N * D1, 0, 0))
    generators.append(coordinates(data, 2 * N * data.D, 0, N * D1, data.D * data.B_prime, 0, 0))
    H = IsotropicSubgroup(A, generators)

    iota_scale = 1 if D1 < 0 else -1
    uK = fundamental_invariant_uK(D1, iota_scale)
    L0 = uK.module
    iota_basis = [A.reduce(_iota(data, e)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    for mu in L0.elements():
        if A.q_int(_iota(data, mu)) * L0.modulus != L0.q_int(mu) * A.modulus:
            raise WeilLiftError(f"iota is not an isometry at {mu}")

    target = N * N * abs(D2)
    extensions: list[Element] = []
    if H.order != target:
        LOGGER.info(
            "weil.h_order_mismatch",
            extra={"event": "weil.h_order_mismatch", "order": H.order, "expected": target},
        )
        H, extensions = _extend_to_order(A, H, iota_basis, target)

    image = {A.reduce(_iota(data, mu)) for mu in L0.elements()}
    if len(image) != L0.order:
        raise WeilLiftError("iota is not injective")
    if any(A.b_int(z, g) for z in iota_basis for g in H.generators):
        raise WeilLiftError("im(iota) is not orthogonal to H")
    if image & H.elements != {A.zero}:
        raise WeilLiftError("im(iota) meets H nontrivially")
    if H.order * len(image) != A.order // H.order:
        raise WeilLiftError(
            f"|H| |im iota| = {H.order * len(image)} differs from |H^perp| = {A.order // H.order}"
        )

    values: dict[Element, mp.mpc] = {}
    for mu, value in uK.values.items():
        base = A.reduce(_iota(data, mu))
        for h in H.elements:
            values[A.add(base, h)] = value
    vector = WeilVector(A, values)
    LOGGER.info(
        "weil.phiN",
        extra={
            "event": "weil.phiN",
            "D1": D1,
            "D2": D2,
            "N": N,
            "order": A.order,
            "h_order": H.order,
            "support": len(values),
        },
    )
    return PhiNConstruction(data, A, H, iota_scale, vector, list(H.generators), extensions)


def build_phiN(D1: int, D2: int, N: int) -> WeilVector:
    """The SL_2(Z)-invariant vector induced from iota(u_K1) along H."""
    return construct_phiN(D1, D2, N).vector
