"""Top-level package for weillift."""

from __future__ import annotations

from importlib import import_module
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .bqf import BQF, HeegnerPoint, class_group, class_number, heegner_points
    from .cmvalues import CMCycle, NormCertificate, cm_cycle, cm_norm, green_GN, green_Gkf, legendre_Q
    from .config import ensure_config_dir, load_config, write_default_config
    from .exceptions import (
        ConfigValidationError,
        IntegralityError,
        InputValidationError,
        PrecisionError,
        WeilLiftError,
    )
    from .lfunc import (
        LValue,
        completed_Lambda,
        dirichlet_L,
        modular_L,
        petersson_norm,
        rankin_selberg_L,
    )
    from .precision import working_precision
    from .qexp import EtaQuotient, Newform, QExpansion, delta_newform, level3_weight6_newform
    from .shintani import cycle_integral, shintani_coefficients, twisted_trace
    from .weil import FiniteQuadraticModule, WeilVector, build_phiN, construct_phiN, weil_S, weil_T

_EXPORTS = {
    "BQF": "bqf",
    "HeegnerPoint": "bqf",
    "class_group": "bqf",
    "class_number": "bqf",
    "heegner_points": "bqf",
    "CMCycle": "cmvalues",
    "NormCertificate": "cmvalues",
    "cm_cycle": "cmvalues",
    "cm_norm": "cmvalues",
    "green_GN": "cmvalues",
    "green_Gkf": "cmvalues",
    "legendre_Q": "cmvalues",
    "ensure_config_dir": "config",
    "load_config": "config",
    "write_default_config": "config",
    "ConfigValidationError": "exceptions",
    "InputValidationError": "exceptions",
    "IntegralityError": "exceptions",
    "PrecisionError": "exceptions",
    "WeilLiftError": "exceptions",
    "LValue": "lfunc",
    "completed_Lambda": "lfunc",
    "dirichlet_L": "lfunc",
    "modular_L": "lfunc",
    "petersson_norm": "lfunc",
    "rankin_selberg_L": "lfunc",
    "working_precision": "precision",
    "EtaQuotient": "qexp",
    "Newform": "qexp",
    "QExpansion": "qexp",
    "delta_newform": "qexp",
    "level3_weight6_newform": "qexp",
    "cycle_integral": "shintani",
    "shintani_coefficients": "shintani",
    "twisted_trace": "shintani",
    "FiniteQuadraticModule": "weil",
    "WeilVector": "weil",
    "build_phiN": "weil",
    "construct_phiN": "weil",
    "weil_S": "weil",
    "weil_T": "weil",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name: str) -> Any:
    """Lazily import symbols so that ``import weil_lift`` stays cheap."""
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    return getattr(import_module(f".{module}", __name__), name)
