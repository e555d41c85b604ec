"""Deterministic worker pool for independent numerical tasks."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from functools import partial
import logging
from typing import TypeVar

import mpmath as mp

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _pinned(fn: Callable[[T], R], prec: int, item: T) -> R:
    with mp.workprec(prec):
        return fn(item)


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    bits: int | None = None,
) -> list[R]:
    """Apply ``fn`` to every item and return results in input order.

    Every task runs at the caller's precision (or ``bits``).  mpmath holds its
    precision in one context per process and evaluations raise it locally, so
    with ``threads > 1`` the tasks run in that many worker processes, each with
    its own context; results are then bit-for-bit those of the serial run.
    ``fn``, the items and the results must be picklable in that case.
    """
    work = list(items)
    prec = mp.mp.prec if bits is None else bits
    if threads <= 1 or len(work) <= 1:
        return [_pinned(fn, prec, item) for item in work]

    workers = min(threads, len(work))
    LOGGER.debug(
        "workers.dispatch",
        extra={"event": "workers.dispatch", "tasks": len(work), "workers": workers, "prec": prec},
    )
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(_pinned, fn, prec), work))
