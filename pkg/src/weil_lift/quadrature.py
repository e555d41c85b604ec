"""Gauss-Legendre panels with adaptive bisection."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache
import logging
from typing import Any

import mpmath as mp

from .exceptions import InputValidationError, QuadratureError

LOGGER = logging.getLogger(__name__)

Integrand = Callable[[mp.mpf], Any]


@dataclass(frozen=True)
class QuadratureResult:
    """Integral estimate with the summed panel disagreement as error."""

    value: mp.mpc
    error: mp.mpf
    panels: int


@lru_cache(maxsize=32)
def _nodes_at(n: int, prec: int) -> tuple[tuple[mp.mpf, ...], tuple[mp.mpf, ...]]:
    with mp.workprec(prec + 20):
        xs = [mp.cos(mp.pi * (4 * k - 1) / (4 * n + 2)) for k in range(1, n + 1)]

        def derivative(x: mp.mpf) -> mp.mpf:
            return n * (x * mp.legendre(n, x) - mp.legendre(n - 1, x)) / (x * x - 1)

        for index, x in enumerate(xs):
            for _ in range(100):
                step = mp.legendre(n, x) / derivative(x)
                x -= step
                if abs(step) < mp.eps * 4:
                    break
            xs[index] = x
        weights = [2 / ((1 - x * x) * derivative(x) ** 2) for x in xs]
    return tuple(+x for x in xs), tuple(+w for w in weights)


def gauss_legendre_nodes(n: int) -> tuple[tuple[mp.mpf, ...], tuple[mp.mpf, ...]]:
    """Nodes and weights of the n-point rule on [-1, 1] at the current precision."""
    if n < 2:
        raise InputValidationError(f"Gauss-Legendre order must be at least 2, got {n}")
    return _nodes_at(n, mp.mp.prec)


def panel(f: Integrand, a: mp.mpf, b: mp.mpf, order: int = 32) -> mp.mpc:
    xs, ws = gauss_legendre_nodes(order)
    half = (b - a) / 2
    mid = (a + b) / 2
    return half * mp.fsum(w * f(mid + half * x) for x, w in zip(xs, ws))


def adaptive_integrate(
    f: Integrand,
    a: Any,
    b: Any,
    order: int = 32,
    tolerance: float = 1e-12,
    max_depth: int = 24,
    initial_panels: int = 4,
) -> QuadratureResult:
    """Integrate f over [a, b], bisecting panels whose halves disagree.

    The tolerance is relative to the magnitude of a coarse first estimate and is
    shared among panels in proportion to their length.
    """
    a, b = mp.mpf(a), mp.mpf(b)
    if a == b:
        return QuadratureResult(mp.mpc(0), mp.mpf(0), 0)
    length = b - a
    edges = [a + length * j / initial_panels for j in range(initial_panels + 1)]
    stack = [
        (edges[j], edges[j + 1], panel(f, edges[j], edges[j + 1], order), 0)
        for j in range(initial_panels)
    ]
    scale = abs(mp.fsum(item[2] for item in stack))
    floor = mp.mpf(2) ** (-mp.mp.prec // 2)
    budget = mp.mpf(tolerance) * max(scale, floor)

    total = mp.mpc(0)
    error = mp.mpf(0)
    accepted = 0
    failed: list[tuple[str, str, str]] = []
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = (lo + hi) / 2
        left = panel(f, lo, mid, order)
        right = panel(f, mid, hi, order)
        halves = left + right
        diff = abs(halves - whole)
        if diff <= budget * abs(hi - lo) / abs(length):
            total += halves
            error += diff
            accepted += 1
            continue
        if depth >= max_depth:
            failed.append((mp.nstr(lo, 12), mp.nstr(hi, 12), mp.nstr(diff, 5)))
            total += halves
            error += diff
            continue
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))
    if failed:
        raise QuadratureError(
            f"adaptive quadrature did not converge on {len(failed)} panel(s)",
            panels=failed,
        )
    LOGGER.debug(
        "quadrature.done",
        extra={"event": "quadrature.done", "panels": accepted, "error": mp.nstr(error, 5)},
    )
    return QuadratureResult(total, error, accepted)


def integrate_until_decay(
    f: Integrand,
    start: Any,
    direction: int = 1,
    step: Any = 1,
    order: int = 32,
    tolerance: float = 1e-12,
    max_depth: int = 24,
    max_steps: int = 200,
) -> QuadratureResult:
    """Integrate f from ``start`` towards +-infinity in growing steps until the tail is negligible."""
    if direction not in (1, -1):
        raise InputValidationError("direction must be +1 or -1")
    position = mp.mpf(start)
    width = mp.mpf(step)
    total = mp.mpc(0)
    error = mp.mpf(0)
    panels = 0
    for _ in range(max_steps):
        target = position + direction * width
        lo, hi = (position, target) if direction > 0 else (target, position)
        part = adaptive_integrate(f, lo, hi, order, tolerance, max_depth, initial_panels=2)
        total += part.value
        error += part.error
        panels += part.panels
        position = target
        if abs(part.value) <= mp.mpf(tolerance) * max(abs(total), mp.mpf(2) ** (-mp.mp.prec // 2)):
            LOGGER.debug(
                "quadrature.tail",
                extra={"event": "quadrature.tail", "end": mp.nstr(position, 8), "panels": panels},
            )
            return QuadratureResult(total, error + abs(part.value), panels)
        width *= 2
    raise QuadratureError(
        f"integrand did not decay within {max_steps} extensions",
        panels=[(mp.nstr(start, 12), mp.nstr(position, 12), mp.nstr(abs(part.value), 5))],
    )
