"""Standard modular forms, genus-zero hauptmoduls and the newform record."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
import json
import logging
from math import gcd
from pathlib import Path
from typing import Any, Protocol

import mpmath as mp
from sympy import bernoulli

from ..exceptions import CoefficientShortageError, InputValidationError
from ..numtheory import factorization, prime_divisors
from .eta import EtaQuotient, reduce_to_fundamental_domain
from .series import QExpansion, sigma_series

LOGGER = logging.getLogger(__name__)

HAUPTMODUL_LEVELS = (3, 5, 7, 13)


class Evaluable(Protocol):
    """Anything that can be evaluated as a modular form on Gamma_0(level)."""

    @property
    def weight(self) -> Fraction: ...

    @property
    def level(self) -> int: ...

    def __call__(self, tau: mp.mpc) -> mp.mpc: ...


def eisenstein(k: int, order: int) -> QExpansion:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for even k >= 4."""
    if k < 4 or k % 2:
        raise InputValidationError(f"Eisenstein series need an even weight >= 4, got {k}")
    B = bernoulli(k)
    factor = Fraction(-2 * k) / Fraction(int(B.p), int(B.q))
    series = sigma_series(k - 1, order).scaled(factor) + QExpansion.constant(1, order)
    return series.with_weight(k)


def delta(order: int) -> QExpansion:
    """Delta = eta^24 = q - 24 q^2 + 252 q^3 - ..., known below q^order."""
    return EtaQuotient(((1, 24),)).qexp(order - 1)


def j_invariant(order: int) -> QExpansion:
    """j = E_4^3 / Delta = q^-1 + 744 + 196884 q + ..., known below q^order."""
    E4 = eisenstein(4, order + 2)
    return (E4**3 / delta(order + 2)).truncate(order).with_weight(0)


def hauptmodul_quotient(N: int) -> EtaQuotient:
    """(eta(z)/eta(N z))^(24/(N-1)) for the genus-zero levels with N - 1 | 24."""
    if N not in HAUPTMODUL_LEVELS:
        raise InputValidationError(f"hauptmoduls are provided for N in {HAUPTMODUL_LEVELS}, got {N}")
    e = 24 // (N - 1)
    return EtaQuotient(((1, e), (N, -e)))


def hauptmodul(N: int, order: int) -> QExpansion:
    """Expansion of the level-N hauptmodul, starting q^-1, known below q^order."""
    return hauptmodul_quotient(N).qexp(order + 1)


def _eisenstein_value(k: int, tau: mp.mpc) -> mp.mpc:
    q = mp.expjpi(2 * tau)
    B = bernoulli(k)
    factor = mp.mpf(-2 * k) * int(B.q) / int(B.p)
    total = mp.mpc(0)
    power = mp.mpc(1)
    n = 1
    while True:
        power *= q
        term = n ** (k - 1) * power / (1 - power)
        total += term
        if abs(term) < mp.eps * abs(total) / 4 or n > 100_000:
            break
        n += 1
    return 1 + factor * total


@dataclass(frozen=True)
class JFunction:
    """Klein's j as an evaluable weight-0 level-1 function."""

    weight: Fraction = Fraction(0)
    level: int = 1

    def __call__(self, tau: mp.mpc) -> mp.mpc:
        reduced, _ = reduce_to_fundamental_domain(tau)
        with mp.extraprec(20):
            E4 = _eisenstein_value(4, reduced)
            D = EtaQuotient(((1, 24),))(reduced)
            value = E4**3 / D
        return +value


def hauptmodul_function(N: int) -> Evaluable:
    """Evaluable hauptmodul of X_0(N); j for N = 1."""
    if N == 1:
        return JFunction()
    return hauptmodul_quotient(N)


@dataclass(frozen=True)
class Newform:
    """A newform given by level, weight and its first Hecke eigenvalues a(1), a(2), ...

    Coefficients beyond the stored list are extended multiplicatively from the
    prime-power recurrence as long as the needed primes are stored.
    """

    level: int
    weight: int
    coeffs: tuple[int, ...]
    fricke: int | None = None
    eta_exponents: tuple[tuple[int, int], ...] | None = None
    label: str = ""
    _cache: dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.level < 1:
            raise InputValidationError(f"level must be positive, got {self.level}")
        if self.weight < 2 or self.weight % 2:
            raise InputValidationError(f"newform weight must be even and >= 2, got {self.weight}")
        if not self.coeffs or self.coeffs[0] != 1:
            raise InputValidationError("a newform is normalized with a(1) = 1")
        if self.fricke not in (None, 1, -1):
            raise InputValidationError(f"Fricke eigenvalue must be +1, -1 or null, got {self.fricke}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], label: str = "") -> Newform:
        try:
            level = int(data["level"])
            weight = int(data["weight"])
            coeffs = tuple(int(c) for c in data["coeffs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputValidationError(f"malformed newform record: {exc}") from exc
        fricke = data.get("fricke")
        raw_eta = data.get("eta_exponents")
        eta_exponents = (
            tuple(sorted((int(d), int(r)) for d, r in raw_eta.items())) if raw_eta else None
        )
        form = cls(level, weight, coeffs, None if fricke is None else int(fricke), eta_exponents, label)
        form.validate()
        return form

    @classmethod
    def from_json(cls, path: Path | str) -> Newform:
        source = Path(path).expanduser()
        try:
            data = json.loads(source.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputValidationError(f"cannot read newform file {source}: {exc}") from exc
        return cls.from_dict(data, label=source.stem)

    def as_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "weight": self.weight,
            "coeffs": list(self.coeffs),
            "fricke": self.fricke,
            "eta_exponents": {str(d): r for d, r in self.eta_exponents} if self.eta_exponents else None,
        }

    @property
    def k(self) -> int:
        """Half the weight."""
        return self.weight // 2

    @property
    def bound(self) -> int:
        return len(self.coeffs)

    @property
    def eta_quotient(self) -> EtaQuotient | None:
        return EtaQuotient(self.eta_exponents) if self.eta_exponents else None

    def with_fricke(self, fricke: int | None) -> Newform:
        return Newform(self.level, self.weight, self.coeffs, fricke, self.eta_exponents, self.label)

    def _prime_power(self, p: int, e: int) -> int:
        if p > self.bound:
            raise CoefficientShortageError(
                f"a({p}) is needed but only {self.bound} coefficients are stored",
                required=p,
            )
        ap = self.coeffs[p - 1]
        if self.level % p == 0:
            return ap**e
        previous, current = 1, ap
        for _ in range(e - 1):
            previous, current = current, ap * current - p ** (self.weight - 1) * previous
        return current if e else 1

    def coefficient(self, n: int) -> int:
        """a(n), stored or extended multiplicatively."""
        if n < 1:
            raise InputValidationError(f"coefficients are indexed from 1, got {n}")
        if n <= self.bound:
            return self.coeffs[n - 1]
        if n in self._cache:
            return self._cache[n]
        value = 1
        for p, e in factorization(n).pairs:
            value *= self._prime_power(p, e)
        self._cache[n] = value
        return value

    def validate(self) -> None:
        """Check multiplicativity and the prime-power recurrence on the stored range."""
        n_max = self.bound
        for m in range(2, n_max + 1):
            for n in range(2, n_max // m + 1):
                if gcd(m, n) == 1 and self.coeffs[m * n - 1] != self.coeffs[m - 1] * self.coeffs[n - 1]:
                    raise InputValidationError(f"a({m * n}) != a({m}) a({n}) for coprime {m}, {n}")
        for p in range(2, n_max + 1):
            if prime_divisors(p) != (p,):
                continue
            power = p
            while power * p <= n_max:
                expected = self.coeffs[p - 1] * self.coeffs[power - 1]
                if self.level % p:
                    expected -= p ** (self.weight - 1) * (self.coeffs[power // p - 1])
                if self.coeffs[power * p - 1] != expected:
                    raise InputValidationError(f"a({power * p}) violates the Hecke recurrence at p={p}")
                power *= p
        quotient = self.eta_quotient
        if quotient is not None:
            if quotient.level != self.level or quotient.weight != self.weight:
                raise InputValidationError("eta exponents do not match the declared level and weight")
            series = quotient.qexp(n_max)
            for n in range(1, n_max + 1):
                if series.coefficient(n) != self.coeffs[n - 1]:
                    raise InputValidationError(f"a({n}) disagrees with the eta-quotient expansion")
        LOGGER.debug(
            "qexp.newform_valid",
            extra={"event": "qexp.newform_valid", "level": self.level, "weight": self.weight, "bound": n_max},
        )

    def qexp(self, order: int | None = None) -> QExpansion:
        order = self.bound + 1 if order is None else order
        return QExpansion.from_function(
            lambda n: self.coefficient(n) if n else 0,
            order,
            weight=self.weight,
            level=self.level,
        )

    def __call__(self, tau: mp.mpc) -> mp.mpc:
        quotient = self.eta_quotient
        if quotient is not None:
            return quotient(tau)
        from .evaluate import evaluate

        return evaluate(self, tau).value


def delta_newform(bound: int = 200) -> Newform:
    """Ramanujan's Delta as the level-1 weight-12 newform."""
    series = delta(bound + 1)
    coeffs = tuple(int(series.coefficient(n)) for n in range(1, bound + 1))
    return Newform(1, 12, coeffs, 1, ((1, 24),), "delta")


def level3_weight6_newform(bound: int = 200) -> Newform:
    """eta(z)^6 eta(3z)^6, the newform of weight 6 on Gamma_0(3)."""
    quotient = EtaQuotient(((1, 6), (3, 6)))
    series = quotient.qexp(bound)
    coeffs = tuple(int(series.coefficient(n)) for n in range(1, bound + 1))
    return Newform(3, 6, coeffs, quotient.fricke_sign(), quotient.exponents, "3.6")


BUILTIN_NEWFORMS = {
    "delta": delta_newform,
    "3.6": level3_weight6_newform,
}


def builtin_newform(name: str, bound: int = 200) -> Newform:
    try:
        factory = BUILTIN_NEWFORMS[name]
    except KeyError as exc:
        raise InputValidationError(f"unknown built-in newform {name!r}; known: {sorted(BUILTIN_NEWFORMS)}") from exc
    return factory(bound)
