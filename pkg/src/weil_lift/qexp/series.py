"""Truncated q-expansions with exact rational or mpmath coefficients."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from math import lcm
from typing import Any, Union

import mpmath as mp

from ..exceptions import CoefficientShortageError, InputValidationError
from ..numtheory import sigma

LOGGER = logging.getLogger(__name__)

Coefficient = Union[Fraction, mp.mpf, mp.mpc]


def to_mp(value: Any) -> mp.mpf | mp.mpc:
    """Convert an exact or mpmath number to mpmath at the current precision."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    return mp.mpmathify(value)


def _coerce(value: Any) -> Coefficient:
    if isinstance(value, bool):
        raise InputValidationError("booleans are not series coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (float, complex)):
        return mp.mpmathify(value)
    if isinstance(value, (mp.mpf, mp.mpc)):
        return value
    raise InputValidationError(f"unsupported coefficient type {type(value).__name__}")


def _unify(values: Sequence[Coefficient]) -> list[Coefficient]:
    if all(isinstance(v, Fraction) for v in values):
        return list(values)
    return [to_mp(v) for v in values]


@dataclass(frozen=True, eq=False)
class QExpansion:
    """Series sum_n c_n q^(n/den) for start <= n < order, unknown from ``order`` on.

    ``weight`` may be half-integral; ``level`` is the Gamma_0 level the series
    is modular for (1 when unknown or irrelevant).
    """

    coeffs: tuple[Coefficient, ...]
    start: int = 0
    den: int = 1
    weight: Fraction = Fraction(0)
    level: int = 1
    order: int | None = field(default=None)

    def __post_init__(self) -> None:
        if self.den < 1:
            raise InputValidationError(f"exponent denominator must be positive, got {self.den}")
        if self.level < 1:
            raise InputValidationError(f"level must be positive, got {self.level}")
        values = _unify([_coerce(c) for c in self.coeffs])
        order = self.start + len(values) if self.order is None else self.order
        if order < self.start:
            raise InputValidationError("truncation order precedes the first exponent")
        width = order - self.start
        zero = Fraction(0) if all(isinstance(v, Fraction) for v in values) else mp.mpf(0)
        values = values[:width] + [zero] * (width - len(values))
        start = self.start
        while values and values[0] == 0:
            values.pop(0)
            start += 1
        object.__setattr__(self, "coeffs", tuple(values))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "weight", Fraction(self.weight))

    @classmethod
    def from_function(
        cls,
        fn: Callable[[int], Any],
        order: int,
        start: int = 0,
        den: int = 1,
        weight: Any = 0,
        level: int = 1,
    ) -> QExpansion:
        return cls(tuple(fn(n) for n in range(start, order)), start, den, Fraction(weight), level, order)

    @classmethod
    def constant(cls, value: Any, order: int, den: int = 1) -> QExpansion:
        return cls((value,), 0, den, Fraction(0), 1, order)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    @property
    def precision(self) -> Fraction:
        """Exponent from which the coefficients are unknown."""
        return Fraction(self.order, self.den)

    def exponents(self) -> Iterable[Fraction]:
        return (Fraction(n, self.den) for n in range(self.start, self.order))

    def items(self) -> Iterable[tuple[Fraction, Coefficient]]:
        return zip(self.exponents(), self.coeffs)

    def _numerator(self, exponent: Any) -> int | None:
        scaled = Fraction(exponent) * self.den
        if scaled.denominator != 1:
            return None
        return int(scaled)

    def coefficient(self, exponent: Any) -> Coefficient:
        """Coefficient of q^exponent; zero off the exponent lattice or below the start."""
        n = self._numerator(exponent)
        if n is not None and n >= self.order:
            raise CoefficientShortageError(
                f"coefficient of q^{exponent} requested but the series is known below q^{self.precision}",
                required=n + 1,
            )
        if n is None or n < self.start:
            return Fraction(0) if self.is_exact else mp.mpf(0)
        return self.coeffs[n - self.start]

    __getitem__ = coefficient

    def valuation(self) -> Fraction | None:
        """Least exponent with a nonzero coefficient, None if nothing nonzero is known."""
        for exponent, c in self.items():
            if c != 0:
                return exponent
        return None

    def rescaled(self, den: int) -> QExpansion:
        """Same series written with exponent denominator ``den`` (a multiple of ``self.den``)."""
        if den % self.den:
            raise InputValidationError(f"denominator {den} is not a multiple of {self.den}")
        factor = den // self.den
        if factor == 1:
            return self
        zero = Fraction(0) if self.is_exact else mp.mpf(0)
        values = [zero] * ((self.order - self.start) * factor)
        for i, c in enumerate(self.coeffs):
            values[i * factor] = c
        return QExpansion(tuple(values), self.start * factor, den, self.weight, self.level, self.order * factor)

    def truncate(self, exponent: Any) -> QExpansion:
        """Forget every coefficient from q^exponent on."""
        n = Fraction(exponent) * self.den
        order = min(self.order, max(self.start, -((-n.numerator) // n.denominator)))
        return QExpansion(self.coeffs[: order - self.start], self.start, self.den, self.weight, self.level, order)

    def shift(self, exponent: Any) -> QExpansion:
        """Multiply by q^exponent."""
        n = self._numerator(exponent)
        if n is None:
            den = lcm(self.den, Fraction(exponent).denominator)
            return self.rescaled(den).shift(exponent)
        return QExpansion(self.coeffs, self.start + n, self.den, self.weight, self.level, self.order + n)

    def with_weight(self, weight: Any, level: int | None = None) -> QExpansion:
        return QExpansion(self.coeffs, self.start, self.den, Fraction(weight), self.level if level is None else level, self.order)

    def numeric(self) -> QExpansion:
        return QExpansion(tuple(to_mp(c) for c in self.coeffs), self.start, self.den, self.weight, self.level, self.order)

    def _aligned(self, other: QExpansion) -> tuple[QExpansion, QExpansion]:
        den = lcm(self.den, other.den)
        return self.rescaled(den), other.rescaled(den)

    def _check_weight(self, other: QExpansion) -> None:
        if self.weight != other.weight:
            raise InputValidationError(f"cannot add series of weights {self.weight} and {other.weight}")

    def __add__(self, other: Any) -> QExpansion:
        if not isinstance(other, QExpansion):
            return self + QExpansion((other,), 0, self.den, self.weight, 1, max(self.order, 0))
        self._check_weight(other)
        a, b = self._aligned(other)
        if not (a.is_exact and b.is_exact):
            a, b = a.numeric(), b.numeric()
        order = min(a.order, b.order)
        start = min(a.start, b.start, order)
        values = [a.coefficient(Fraction(n, a.den)) + b.coefficient(Fraction(n, a.den)) for n in range(start, order)]
        return QExpansion(tuple(values), start, a.den, a.weight, lcm(a.level, b.level), order)

    __radd__ = __add__

    def __neg__(self) -> QExpansion:
        return QExpansion(tuple(-c for c in self.coeffs), self.start, self.den, self.weight, self.level, self.order)

    def __sub__(self, other: Any) -> QExpansion:
        return self + (-other)

    def __rsub__(self, other: Any) -> QExpansion:
        return (-self) + other

    def scaled(self, factor: Any) -> QExpansion:
        c = _coerce(factor)
        if not (self.is_exact and isinstance(c, Fraction)):
            c = to_mp(c)
        return QExpansion(tuple(c * v for v in self.coeffs), self.start, self.den, self.weight, self.level, self.order)

    def __mul__(self, other: Any) -> QExpansion:
        if not isinstance(other, QExpansion):
            return self.scaled(other)
        a, b = self._aligned(other)
        order = min(a.order + b.start, b.order + a.start)
        start = a.start + b.start
        width = max(order - start, 0)
        if a.is_exact and b.is_exact:
            values: list[Any] = [Fraction(0)] * width
        else:
            a, b = a.numeric(), b.numeric()
            values = [mp.mpf(0)] * width
        for i, x in enumerate(a.coeffs[:width]):
            if x == 0:
                continue
            for j, y in enumerate(b.coeffs[: width - i]):
                values[i + j] += x * y
        return QExpansion(tuple(values), start, a.den, a.weight + b.weight, lcm(a.level, b.level), start + width)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> QExpansion:
        if isinstance(other, QExpansion):
            return self * other.inverse()
        c = _coerce(other)
        if c == 0:
            raise InputValidationError("division by zero")
        return self.scaled(1 / c)

    def __rtruediv__(self, other: Any) -> QExpansion:
        return self.inverse() * other

    def inverse(self) -> QExpansion:
        """Reciprocal series; the leading known coefficient must be nonzero."""
        v = self.valuation()
        if v is None:
            raise InputValidationError("cannot invert a series with no known nonzero coefficient")
        lead = self._numerator(v)
        a = self.coeffs[lead - self.start :]
        width = self.order - lead
        inv0 = 1 / a[0]
        b: list[Any] = [inv0]
        for n in range(1, width):
            total = sum((a[i] * b[n - i] for i in range(1, n + 1)), Fraction(0) if self.is_exact else mp.mpf(0))
            b.append(-total * inv0)
        return QExpansion(tuple(b), -lead, self.den, -self.weight, self.level, -lead + width)

    def __pow__(self, exponent: int) -> QExpansion:
        if not isinstance(exponent, int):
            raise InputValidationError(f"only integer powers are supported, got {exponent!r}")
        if exponent < 0:
            return self.inverse() ** (-exponent)
        v = self.valuation()
        relative = self.order - (self._numerator(v) if v is not None else self.start)
        result = QExpansion((1,), 0, self.den, Fraction(0), self.level, relative)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def derivative(self) -> QExpansion:
        """q d/dq; exponents n/den pick up the factor n/den and the weight grows by 2."""
        values = [c * Fraction(n, self.den) if isinstance(c, Fraction) else c * n / self.den
                  for n, c in zip(range(self.start, self.order), self.coeffs)]
        return QExpansion(tuple(values), self.start, self.den, self.weight + 2, self.level, self.order)

    def map_coefficients(self, fn: Callable[[Fraction, Coefficient], Any], order: int | None = None) -> QExpansion:
        """New series with c_n replaced by fn(exponent, c_n)."""
        return QExpansion(
            tuple(fn(e, c) for e, c in self.items()),
            self.start,
            self.den,
            self.weight,
            self.level,
            self.order if order is None else order,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.weight != other.weight:
            return False
        a, b = self._aligned(other)
        if a.order != b.order:
            return False
        for n in range(min(a.start, b.start), a.order):
            e = Fraction(n, a.den)
            if a.coefficient(e) != b.coefficient(e):
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def evaluate_q(self, q: Any, q_root: Any | None = None) -> mp.mpc:
        """Sum the known terms at q; ``q_root`` is q^(1/den) when den > 1."""
        if self.den > 1 and q_root is None:
            raise InputValidationError("fractional exponents need q^(1/den)")
        base = to_mp(q if self.den == 1 else q_root)
        power = mp.power(base, self.start)
        total = mp.mpc(0)
        for c in self.coeffs:
            if c != 0:
                total += to_mp(c) * power
            power *= base
        return total

    def tail_bound(self, q_abs: Any, window: int = 8) -> mp.mpf:
        """Estimate of the omitted terms.

        The last known coefficients give the size C at n = order; coefficients are
        taken to grow like n^w (w the weight), which is summed geometrically.
        """
        r = to_mp(q_abs) ** (mp.mpf(1) / self.den)
        tail = self.coeffs[-window:] if self.coeffs else ()
        big = max((abs(to_mp(c)) for c in tail), default=mp.mpf(0))
        if self.order <= 0:
            return mp.inf
        ratio = r * mp.exp(max(to_mp(self.weight), mp.mpf(1)) / self.order)
        if ratio >= 1:
            return mp.inf
        return (big + 1) * r**self.order / (1 - ratio)

    def as_records(self, digits: int = 20) -> list[dict[str, str]]:
        out = []
        for e, c in self.items():
            if isinstance(c, Fraction):
                value = str(c)
            else:
                value = mp.nstr(c, digits)
            out.append({"exponent": str(e), "value": value})
        return out

    def __repr__(self) -> str:
        head = ", ".join(f"{c}q^{e}" for e, c in list(self.items())[:4])
        return f"QExpansion(weight={self.weight}, level={self.level}, [{head} ... + O(q^{self.precision})])"


def sigma_series(k: int, order: int) -> QExpansion:
    """sum_{n >= 1} sigma_k(n) q^n below q^order."""
    return QExpansion.from_function(lambda n: sigma(k, n) if n else 0, order)
