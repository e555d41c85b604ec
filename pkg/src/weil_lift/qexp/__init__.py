"""Truncated q-expansions and the classical modular forms built on them.

Available pieces:
- QExpansion: exact or numerical truncated series with weight and level
- eta, EtaQuotient, eta_quotient: Dedekind eta and its products
- eisenstein, delta, j_invariant, hauptmodul, Newform: standard forms
- evaluate, fricke_eigenvalue: Gamma_0(N)-aware numerical evaluation
- hecke_T, hecke_U, hecke_V, cohen_operator, trace_down: operators
"""

from __future__ import annotations

from .eta import (
    EtaQuotient,
    dedekind_sum,
    eta,
    eta_multiplier,
    eta_qexp,
    eta_quotient,
    eta_transform,
    is_cusp_form,
    order_at_cusp,
    reduce_to_fundamental_domain,
)
from .evaluate import Evaluation, evaluate, fricke_eigenvalue, gamma0_reduce
from .forms import (
    BUILTIN_NEWFORMS,
    JFunction,
    Newform,
    builtin_newform,
    delta,
    delta_newform,
    eisenstein,
    hauptmodul,
    hauptmodul_function,
    hauptmodul_quotient,
    j_invariant,
    level3_weight6_newform,
)
from .operators import (
    ScaledForm,
    TraceResult,
    atkin_lehner,
    cohen_operator,
    hecke_T,
    hecke_U,
    hecke_V,
    trace_cosets,
    trace_down,
)
from .series import QExpansion, sigma_series, to_mp

__all__ = [
    "BUILTIN_NEWFORMS",
    "EtaQuotient",
    "Evaluation",
    "JFunction",
    "Newform",
    "QExpansion",
    "ScaledForm",
    "TraceResult",
    "atkin_lehner",
    "builtin_newform",
    "cohen_operator",
    "dedekind_sum",
    "delta",
    "delta_newform",
    "eisenstein",
    "eta",
    "eta_multiplier",
    "eta_qexp",
    "eta_quotient",
    "eta_transform",
    "evaluate",
    "fricke_eigenvalue",
    "gamma0_reduce",
    "hauptmodul",
    "hauptmodul_function",
    "hauptmodul_quotient",
    "hecke_T",
    "hecke_U",
    "hecke_V",
    "is_cusp_form",
    "j_invariant",
    "level3_weight6_newform",
    "order_at_cusp",
    "reduce_to_fundamental_domain",
    "sigma_series",
    "to_mp",
    "trace_cosets",
    "trace_down",
]
