"""Finite quadratic modules and the Weil representation of SL_2(Z) on their group algebra."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
import logging
from math import lcm, prod

import mpmath as mp
import numpy as np
from sympy import Matrix, Rational

from ..exceptions import DegenerateModuleError, InputValidationError, WeilLiftError

LOGGER = logging.getLogger(__name__)

Element = tuple[int, ...]

DEFAULT_DENSE_LIMIT = 4_000_000
ENUMERATION_LIMIT = 500_000
CHUNK_PAIRS = 1_000_000


def _fraction_rows(rows: Sequence[Sequence[int | Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _to_sympy(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    return Matrix(
        [[Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows]
    )


def _from_sympy(m: Matrix) -> list[list[Fraction]]:
    return [[Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.cols)] for i in range(m.rows)]


def _columns(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[int(rows[i][j]) for i in range(len(rows))] for j in range(len(rows[0]))]


def _rows(columns: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[int(columns[j][i]) for j in range(len(columns))] for i in range(len(columns[0]))]


def column_hnf(columns: Iterable[Sequence[int]], n: int) -> list[list[int]]:
    """Upper triangular basis (as columns) of the full-rank lattice spanned by ``columns``.

    Column i has a positive pivot in row i and zeros below it; entries to the right
    of a pivot are reduced modulo that pivot.
    """
    active = [list(map(int, c)) for c in columns if any(c)]
    basis: list[list[int]] = [[] for _ in range(n)]
    for i in reversed(range(n)):
        while True:
            nonzero = [c for c in active if c[i] != 0]
            if len(nonzero) <= 1:
                break
            pivot = min(nonzero, key=lambda c: abs(c[i]))
            for c in nonzero:
                if c is pivot:
                    continue
                q = c[i] // pivot[i]
                for r in range(i + 1):
                    c[r] -= q * pivot[r]
            active = [c for c in active if any(c)]
        if not nonzero:
            raise DegenerateModuleError("relation lattice does not have full rank")
        pivot = nonzero[0]
        if pivot[i] < 0:
            pivot[:] = [-x for x in pivot]
        basis[i] = pivot
        active = [c for c in active if c is not pivot and any(c)]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


def annihilator(vectors: Iterable[Sequence[Fraction]], n: int) -> list[list[int]]:
    """Basis columns of {x in Z^n : x . v in Z for every v in ``vectors``}."""
    spanning = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    spanning += [[Fraction(x) for x in v] for v in vectors]
    scale = lcm(*(x.denominator for v in spanning for x in v))
    integral = [[int(x * scale) for x in v] for v in spanning]
    basis = column_hnf(integral, n)
    inverse_t = _to_sympy(_rows(basis)).inv().T * scale
    dual = _from_sympy(inverse_t)
    if any(x.denominator != 1 for row in dual for x in row):
        raise WeilLiftError("annihilator lattice is not integral")
    return _columns([[int(x) for x in row] for row in dual])


@lru_cache(maxsize=64)
def _unit_roots(modulus: int, prec: int) -> tuple[mp.mpc, ...]:
    with mp.workprec(prec):
        return tuple(mp.expjpi(mp.mpf(2 * j) / modulus) for j in range(modulus))


def unit_root(j: int, modulus: int) -> mp.mpc:
    """e(j / modulus) at the current precision."""
    return _unit_roots(modulus, mp.mp.prec)[j % modulus]


class FiniteQuadraticModule:
    """A = Z^n / R Z^n with Q(x) = x^T G x / 2 mod 1.

    ``gram`` is the rational matrix G of the bilinear form; the columns of
    ``relations`` generate the relation lattice R.  Elements are canonical integer
    tuples in the box 0 <= x_i < d_i cut out by the Hermite normal form of R.
    """

    def __init__(
        self,
        gram: Sequence[Sequence[int | Fraction]],
        relations: Sequence[Sequence[int]],
        name: str = "",
        components: Sequence[FiniteQuadraticModule] = (),
    ):
        G = _fraction_rows(gram)
        n = len(G)
        if n == 0 or any(len(row) != n for row in G):
            raise InputValidationError("gram matrix must be square and non-empty")
        if any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
            raise InputValidationError("gram matrix must be symmetric")
        if len(relations) != n or any(len(row) != n for row in relations):
            raise InputValidationError("relation matrix must match the gram matrix shape")
        self.rank = n
        self.gram = G
        self.name = name
        self.components = tuple(components)
        self._basis = column_hnf(_columns(relations), n)
        self.diagonal = tuple(self._basis[i][i] for i in range(n))
        self.order = prod(self.diagonal)
        level = lcm(*(x.denominator for row in G for x in row))
        self.modulus = 2 * level
        self._B = [[int(G[i][j] * level) % self.modulus for j in range(n)] for i in range(n)]
        self._check_well_defined()
        self._check_nondegenerate()

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<FiniteQuadraticModule{label} order={self.order} diagonal={self.diagonal}>"

    @property
    def _key(self) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[tuple[int, ...], ...]]:
        return self.gram, tuple(tuple(column) for column in self._basis)

    def __eq__(self, other: object) -> bool:
        """Same Gram matrix and relation lattice; names and components are labels only."""
        if not isinstance(other, FiniteQuadraticModule):
            return NotImplemented
        return self is other or self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    # constructors

    @classmethod
    def cyclic(cls, n: int, a: int = 1) -> FiniteQuadraticModule:
        """Z/n with Q(x) = a x^2 / n."""
        if n < 1:
            raise InputValidationError(f"cyclic module needs n >= 1, got {n}")
        return cls([[Fraction(2 * a, n)]], [[n]], name=f"Z/{n}({a}x^2/{n})")

    @classmethod
    def hyperbolic(cls, n: int) -> FiniteQuadraticModule:
        """(Z/n)^2 with Q(x, y) = x y / n."""
        return cls(
            [[0, Fraction(1, n)], [Fraction(1, n), 0]],
            [[n, 0], [0, n]],
            name=f"hyperbolic({n})",
        )

    @classmethod
    def from_lattice_gram(cls, S: Sequence[Sequence[int]], name: str = "") -> FiniteQuadraticModule:
        """Discriminant form L^v/L of the even lattice with gram matrix S."""
        if any(S[i][i] % 2 for i in range(len(S))):
            raise InputValidationError("lattice gram matrix must have even diagonal")
        inverse = _from_sympy(_to_sympy(S).inv())
        return cls(inverse, S, name=name)

    @classmethod
    def from_dual_gram(cls, G: Sequence[Sequence[int | Fraction]], name: str = "") -> FiniteQuadraticModule:
        """Module M^v/M given the gram matrix G of a basis of the dual lattice M^v."""
        inverse = _from_sympy(_to_sympy(G).inv())
        if any(x.denominator != 1 for row in inverse for x in row):
            raise InputValidationError("inverse of the dual gram matrix is not integral")
        return cls(G, [[int(x) for x in row] for row in inverse], name=name)

    def negated(self) -> FiniteQuadraticModule:
        return FiniteQuadraticModule(
            [[-x for x in row] for row in self.gram],
            _rows(self._basis),
            name=f"-({self.name})" if self.name else "",
            components=tuple(c.negated() for c in self.components),
        )

    def direct_sum(self, other: FiniteQuadraticModule) -> FiniteQuadraticModule:
        n, m = self.rank, other.rank
        gram = [[Fraction(0)] * (n + m) for _ in range(n + m)]
        relations = [[0] * (n + m) for _ in range(n + m)]
        mine, theirs = _rows(self._basis), _rows(other._basis)
        for i in range(n):
            for j in range(n):
                gram[i][j] = self.gram[i][j]
                relations[i][j] = mine[i][j]
        for i in range(m):
            for j in range(m):
                gram[n + i][n + j] = other.gram[i][j]
                relations[n + i][n + j] = theirs[i][j]
        parts = (self.components or (self,)) + (other.components or (other,))
        return FiniteQuadraticModule(
            gram, relations, name=" + ".join(p.name or "?" for p in parts), components=parts
        )

    # validation

    def _check_well_defined(self) -> None:
        for column in self._basis:
            image = [sum(self.gram[i][j] * column[j] for j in range(self.rank)) for i in range(self.rank)]
            if any(x.denominator != 1 for x in image) or self.q_int(column, reduce=False):
                raise InputValidationError(
                    "quadratic form is not well defined modulo the relation lattice"
                )

    def _check_nondegenerate(self) -> None:
        radical_lattice = annihilator([list(row) for row in self.gram], self.rank)
        index = abs(int(_to_sympy(_rows(radical_lattice)).det()))
        if index != self.order:
            raise DegenerateModuleError(
                f"bilinear form of {self!r} is degenerate (radical of order {self.order // index})"
            )

    # group structure

    def reduce(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank:
            raise InputValidationError(f"element {tuple(x)} does not have rank {self.rank}")
        y = [int(v) for v in x]
        for i in reversed(range(self.rank)):
            column = self._basis[i]
            q = y[i] // column[i]
            if q:
                for r in range(i + 1):
                    y[r] -= q * column[r]
        return tuple(y)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def add(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x: Sequence[int]) -> Element:
        return self.reduce([-a for a in x])

    def multiply(self, k: int, x: Sequence[int]) -> Element:
        return self.reduce([k * a for a in x])

    def element_order(self, x: Sequence[int]) -> int:
        x = self.reduce(x)
        k, y = 1, x
        while y != self.zero:
            y = self.add(y, x)
            k += 1
        return k

    def q_int(self, x: Sequence[int], reduce: bool = True) -> int:
        """Q(x) * modulus, reduced into [0, modulus)."""
        if reduce:
            x = self.reduce(x)
        n = self.rank
        value = sum(self._B[i][i] * x[i] * x[i] for i in range(n))
        value += 2 * sum(self._B[i][j] * x[i] * x[j] for i in range(n) for j in range(i + 1, n))
        return value % self.modulus

    def Q(self, x: Sequence[int]) -> Fraction:
        return Fraction(self.q_int(x), self.modulus)

    def b_int(self, x: Sequence[int], y: Sequence[int]) -> int:
        """(x, y) * modulus, reduced into [0, modulus)."""
        n = self.rank
        return (2 * sum(self._B[i][j] * x[i] * y[j] for i in range(n) for j in range(n))) % self.modulus

    def bilinear(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        return Fraction(self.b_int(x, y), self.modulus)

    def is_isotropic(self, x: Sequence[int]) -> bool:
        return self.q_int(x) == 0

    # enumeration

    def index(self, x: Sequence[int]) -> int:
        x = self.reduce(x)
        result = 0
        for value, size in zip(x, self.diagonal):
            result = result * size + value
        return result

    def elements(self) -> list[Element]:
        if self.order > ENUMERATION_LIMIT:
            raise InputValidationError(
                f"module of order {self.order} is too large to enumerate (limit {ENUMERATION_LIMIT})"
            )
        return self._elements

    @cached_property
    def _elements(self) -> list[Element]:
        return [tuple(x) for x in product(*(range(d) for d in self.diagonal))]

    def coordinates(self, elements: Sequence[Element]) -> np.ndarray:
        return np.asarray(elements, dtype=np.int64).reshape(len(elements), self.rank)

    def q_ints(self, coords: np.ndarray) -> np.ndarray:
        B = np.asarray(self._B, dtype=np.int64)
        return np.einsum("ki,ij,kj->k", coords, B, coords) % self.modulus

    # Milgram

    def gauss_sum(self) -> mp.mpc:
        """Sum of e(Q(x)) over the module; multiplicative over recorded components."""
        if self.components:
            result = mp.mpc(1)
            for part in self.components:
                result *= part.gauss_sum()
            return result
        counts = np.bincount(self.q_ints(self.coordinates(self.elements())), minlength=self.modulus)
        return mp.fsum(int(c) * unit_root(j, self.modulus) for j, c in enumerate(counts) if c)

    @cached_property
    def signature(self) -> int:
        """Signature mod 8 from the Milgram formula sum e(Q) = sqrt|A| e(sig/8)."""
        total = self.gauss_sum()
        root = mp.sqrt(self.order)
        tolerance = mp.mpf(10) ** (-(mp.mp.dps // 2)) * root
        if abs(abs(total) - root) > tolerance:
            raise DegenerateModuleError(
                f"Gauss sum of {self!r} has magnitude {mp.nstr(abs(total), 10)}, expected sqrt({self.order})"
            )
        eighths = int(mp.nint(8 * mp.arg(total) / (2 * mp.pi))) % 8
        if abs(total - root * unit_root(eighths, 8)) > tolerance:
            raise DegenerateModuleError(f"Gauss sum of {self!r} is not an eighth root of unity times sqrt|A|")
        return eighths


def signature_mod8(module: FiniteQuadraticModule) -> int:
    return module.signature


@dataclass
class WeilVector:
    """Finitely supported function on a finite quadratic module."""

    module: FiniteQuadraticModule
    values: dict[Element, mp.mpc] = field(default_factory=dict)

    @classmethod
    def basis(cls, module: FiniteQuadraticModule, x: Sequence[int]) -> WeilVector:
        return cls(module, {module.reduce(x): mp.mpc(1)})

    @classmethod
    def from_function(
        cls,
        module: FiniteQuadraticModule,
        fn: Callable[[Element], complex | int | mp.mpc],
        elements: Iterable[Element] | None = None,
    ) -> WeilVector:
        values = {}
        for x in module.elements() if elements is None else elements:
            value = fn(x)
            if value:
                values[module.reduce(x)] = mp.mpc(value)
        return cls(module, values)

    def coefficient(self, x: Sequence[int]) -> mp.mpc:
        return self.values.get(self.module.reduce(x), mp.mpc(0))

    def support(self) -> list[Element]:
        return sorted(x for x, value in self.values.items() if value != 0)

    def _combine(self, other: WeilVector, sign: int) -> WeilVector:
        if other.module != self.module:
            raise InputValidationError("Weil vectors live on different modules")
        values = dict(self.values)
        for x, value in other.values.items():
            values[x] = values.get(x, mp.mpc(0)) + sign * value
        return WeilVector(self.module, values)

    def __add__(self, other: WeilVector) -> WeilVector:
        return self._combine(other, 1)

    def __sub__(self, other: WeilVector) -> WeilVector:
        return self._combine(other, -1)

    def __neg__(self) -> WeilVector:
        return self.scaled(-1)

    def scaled(self, c: complex | mp.mpc | int) -> WeilVector:
        return WeilVector(self.module, {x: c * value for x, value in self.values.items()})

    def norm(self) -> mp.mpf:
        return mp.sqrt(mp.fsum(abs(value) ** 2 for value in self.values.values()))

    def inner(self, other: WeilVector) -> mp.mpc:
        """Hermitian inner product sum v(x) conj(w(x))."""
        return mp.fsum(value * mp.conj(other.coefficient(x)) for x, value in self.values.items())

    def restricted(self, elements: Iterable[Element]) -> WeilVector:
        return WeilVector(self.module, {x: self.coefficient(x) for x in elements})

    def as_records(self, digits: int = 20) -> list[dict[str, object]]:
        return [
            {
                "element": list(x),
                "re": mp.nstr(mp.re(self.values[x]), digits),
                "im": mp.nstr(mp.im(self.values[x]), digits),
            }
            for x in self.support()
        ]


def weil_T(v: WeilVector) -> WeilVector:
    """rho(T) e_x = e(Q(x)) e_x."""
    A = v.module
    return WeilVector(A, {x: unit_root(A.q_int(x), A.modulus) * value for x, value in v.values.items()})


def weil_S(
    v: WeilVector,
    targets: Sequence[Element] | None = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> WeilVector:
    """rho(S) e_x = e(-sig/8) |A|^(-1/2) sum_y e(-(x, y)) e_y, evaluated on ``targets``.

    Without targets the whole module is enumerated.  Above ``dense_limit`` target-support
    pairs the character sums run in numpy complex128 chunks instead of mpmath.
    """
    A = v.module
    if targets is None:
        targets = A.elements()
    support = [x for x, value in v.values.items() if value != 0]
    prefactor = unit_root(-A.signature, 8) / mp.sqrt(A.order)
    if not support or not targets:
        return WeilVector(A, {x: mp.mpc(0) for x in targets})

    B = np.asarray(A._B, dtype=np.int64)
    source = A.coordinates(support)
    sink = A.coordinates(list(targets))
    paired = (2 * (source @ B)) % A.modulus
    vals = [v.values[x] for x in support]
    pairs = len(targets) * len(support)
    rows = max(1, CHUNK_PAIRS // len(support))
    out: dict[Element, mp.mpc] = {}

    if pairs <= dense_limit:
        roots = _unit_roots(A.modulus, mp.mp.prec)
        for start in range(0, len(targets), rows):
            exponents = (sink[start : start + rows] @ paired.T) % A.modulus
            for offset, row in enumerate(exponents.tolist()):
                total = mp.fsum(roots[-e] * val for e, val in zip(row, vals))
                out[targets[start + offset]] = prefactor * total
    else:
        LOGGER.debug(
            "weil.vectorised",
            extra={"event": "weil.vectorised", "pairs": pairs, "order": A.order},
        )
        weights = np.array([complex(val) for val in vals], dtype=np.complex128)
        for start in range(0, len(targets), rows):
            exponents = (sink[start : start + rows] @ paired.T) % A.modulus
            sums = np.exp(-2j * np.pi * exponents / A.modulus) @ weights
            for offset, value in enumerate(sums.tolist()):
                out[targets[start + offset]] = prefactor * mp.mpc(value)
    return WeilVector(A, out)


def weil_S_squared(v: WeilVector) -> WeilVector:
    """rho(S)^2 e_x = e(-sig/4) e_{-x}."""
    A = v.module
    factor = unit_root(-2 * A.signature, 8)
    return WeilVector(A, {A.neg(x): factor * value for x, value in v.values.items()})


def braid_residual(v: WeilVector, dense_limit: int = DEFAULT_DENSE_LIMIT) -> mp.mpf:
    """|| (rho(S) rho(T))^3 v - rho(S)^2 v ||."""
    w = v
    for _ in range(3):
        w = weil_S(weil_T(w), dense_limit=dense_limit)
    return (w - weil_S_squared(v)).norm()


def invariance_residuals(v: WeilVector, dense_limit: int = DEFAULT_DENSE_LIMIT) -> dict[str, mp.mpf]:
    """Relative residuals ||rho(g) v - v|| / ||v|| for g = S, T, using only supp(v).

    By unitarity the mass of rho(S) v outside the support equals
    ||v||^2 - ||(rho(S) v)|supp||^2.  That difference cancels, so a residual
    computed at p bits cannot fall below about 2^(-p/2); the S image is
    therefore evaluated at twice the working precision, which brings the floor
    down to about 2^(-p).  Above ``dense_limit`` pairs the image is complex128
    and the floor is about 1e-8.
    """
    A = v.module
    support = v.support()
    norm = v.norm()
    if norm == 0:
        raise InputValidationError("invariance residuals of the zero vector are undefined")
    t_res = mp.sqrt(
        mp.fsum(abs((unit_root(A.q_int(x), A.modulus) - 1) * v.values[x]) ** 2 for x in support)
    )
    with mp.extraprec(mp.mp.prec):
        image = weil_S(v, targets=support, dense_limit=dense_limit)
        inside = mp.fsum(abs(image.values[x] - v.values[x]) ** 2 for x in support)
        mass = mp.fsum(abs(image.values[x]) ** 2 for x in support)
        outside = max(mp.mpf(0), v.norm() ** 2 - mass)
        s_res = mp.sqrt(inside + outside)
    s_res = +s_res
    LOGGER.debug(
        "weil.residual",
        extra={
            "event": "weil.residual",
            "support": len(support),
            "S": mp.nstr(s_res / norm, 5),
            "T": mp.nstr(t_res / norm, 5),
        },
    )
    return {"S": s_res / norm, "T": t_res / norm}


class IsotropicSubgroup:
    """Subgroup H of A on which Q vanishes, with its orthogonal complement and H^perp/H."""

    def __init__(self, module: FiniteQuadraticModule, generators: Iterable[Sequence[int]]):
        self.module = module
        self.generators = tuple(module.reduce(g) for g in generators)
        for g in self.generators:
            if not module.is_isotropic(g):
                raise InputValidationError(f"generator {g} is not isotropic (Q = {module.Q(g)})")
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1 :]:
                if module.b_int(g, h):
                    raise InputValidationError(f"generators {g} and {h} are not orthogonal")
        self.elements = self._span()

    def _span(self) -> frozenset[Element]:
        A = self.module
        found = {A.zero}
        for g in self.generators:
            frontier = list(found)
            while frontier:
                fresh = []
                for x in frontier:
                    y = A.add(x, g)
                    if y not in found:
                        found.add(y)
                        fresh.append(y)
                frontier = fresh
        return frozenset(found)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def perp_order(self) -> int:
        return self.module.order // self.order

    def __contains__(self, x: Sequence[int]) -> bool:
        return self.module.reduce(x) in self.elements

    def in_perp(self, x: Sequence[int]) -> bool:
        return all(self.module.b_int(x, g) == 0 for g in self.generators)

    def extended(self, generator: Sequence[int]) -> IsotropicSubgroup:
        return IsotropicSubgroup(self.module, self.generators + (self.module.reduce(generator),))

    @cached_property
    def _quotient_data(self) -> tuple[FiniteQuadraticModule, list[list[int]], list[list[Fraction]]]:
        A = self.module
        n = A.rank
        paired = [
            [sum(A.gram[i][j] * g[j] for j in range(n)) for i in range(n)] for g in self.generators
        ]
        perp_basis = annihilator(paired, n)
        kernel_basis = column_hnf(A._basis + [list(g) for g in self.generators], n)
        P = _rows(perp_basis)
        P_sym = _to_sympy(P)
        P_inv = _from_sympy(P_sym.inv())
        gram = _from_sympy(P_sym.T * _to_sympy(A.gram) * P_sym)
        relations = _from_sympy(P_sym.inv() * _to_sympy(_rows(kernel_basis)))
        if any(x.denominator != 1 for row in relations for x in row):
            raise WeilLiftError("H is not contained in its orthogonal complement")
        quotient = FiniteQuadraticModule(
            gram,
            [[int(x) for x in row] for row in relations],
            name=f"H^perp/H in {A.name}" if A.name else "",
        )
        return quotient, P, P_inv

    @property
    def quotient(self) -> FiniteQuadraticModule:
        return self._quotient_data[0]

    def lift(self, y: Sequence[int]) -> Element:
        """Element of H^perp in A representing the class y of H^perp/H."""
        _, P, _ = self._quotient_data
        n = self.module.rank
        return self.module.reduce([sum(P[i][j] * y[j] for j in range(n)) for i in range(n)])

    def project(self, x: Sequence[int]) -> Element:
        """Class in H^perp/H of an element x of H^perp."""
        if not self.in_perp(x):
            raise InputValidationError(f"{tuple(x)} is not orthogonal to H")
        quotient, _, P_inv = self._quotient_data
        n = self.module.rank
        x = self.module.reduce(x)
        y = [sum(P_inv[i][j] * x[j] for j in range(n)) for i in range(n)]
        if any(v.denominator != 1 for v in y):
            raise WeilLiftError(f"{x} does not lie on the H^perp lattice")
        return quotient.reduce([int(v) for v in y])


def induce(H: IsotropicSubgroup, w: WeilVector) -> WeilVector:
    """Induction C[H^perp/H] -> C[A], e_mu -> sum over lambda in H + mu of e_lambda."""
    if w.module != H.quotient:
        raise InputValidationError("vector does not live on H^perp/H of this subgroup")
    A = H.module
    values: dict[Element, mp.mpc] = {}
    for mu, value in w.values.items():
        base = H.lift(mu)
        for h in H.elements:
            x = A.add(base, h)
            values[x] = values.get(x, mp.mpc(0)) + value
    return WeilVector(A, values)


def restrict(v: WeilVector, H: IsotropicSubgroup) -> WeilVector:
    """Adjoint of induction: sums v over each coset mu + H of H^perp."""
    if v.module != H.module:
        raise InputValidationError("vector does not live on the ambient module of H")
    values: dict[Element, mp.mpc] = {}
    for x, value in v.values.items():
        if H.in_perp(x):
            mu = H.project(x)
            values[mu] = values.get(mu, mp.mpc(0)) + value
    return WeilVector(H.quotient, values)


def invariant_dimension(module: FiniteQuadraticModule) -> int:
    """Dimension of the SL_2(Z)-invariants of C[A], by dense linear algebra."""
    elements = module.elements()
    if len(elements) > 2000:
        raise InputValidationError("invariant_dimension is limited to modules of order <= 2000")
    coords = module.coordinates(elements)
    B = np.asarray(module._B, dtype=np.int64)
    exponents = (2 * (coords @ B) @ coords.T) % module.modulus
    prefactor = complex(unit_root(-module.signature, 8)) / np.sqrt(module.order)
    S = prefactor * np.exp(-2j * np.pi * exponents / module.modulus)
    T = np.diag(np.exp(2j * np.pi * module.q_ints(coords) / module.modulus))
    identity = np.eye(len(elements))
    stacked = np.vstack([S - identity, T - identity])
    singular = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(singular < 1e-8))
