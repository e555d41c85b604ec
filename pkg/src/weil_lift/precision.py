"""Working-precision helpers around the mpmath global context."""

from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
import logging
import os
from typing import Any

import mpmath as mp

from .config import PREC_ENV_VAR
from .exceptions import InputValidationError

LOGGER = logging.getLogger(__name__)

MIN_BITS = 64
DEFAULT_BITS = 256


def validate_bits(bits: int) -> int:
    if not isinstance(bits, int) or isinstance(bits, bool):
        raise InputValidationError(f"precision must be an integer number of bits, got {bits!r}")
    if bits < MIN_BITS:
        raise InputValidationError(f"precision must be at least {MIN_BITS} bits, got {bits}")
    return bits


def resolve_bits(cli_value: int | None, config: dict[str, Any] | None = None) -> int:
    """Pick the working precision: CLI flag, then config, then environment.

    A loaded config already carries any valid environment override.
    """
    if cli_value is not None:
        return validate_bits(cli_value)
    if config is not None:
        return validate_bits(int(config["precision"]["bits"]))
    raw = os.environ.get(PREC_ENV_VAR, "").strip()
    if raw:
        try:
            return validate_bits(int(raw))
        except ValueError as exc:
            raise InputValidationError(f"{PREC_ENV_VAR}={raw!r} is not an integer") from exc
    return DEFAULT_BITS


@contextmanager
def working_precision(bits: int) -> Iterator[int]:
    """Run a block at ``bits`` of binary precision, restoring the old value."""
    validate_bits(bits)
    with mp.workprec(bits):
        yield bits
