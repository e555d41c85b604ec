"""Finite quadratic modules and Weil-representation invariants.

Available pieces:
- FiniteQuadraticModule, WeilVector, IsotropicSubgroup: the carriers
- weil_S, weil_T, induce, restrict: the representation and its functoriality
- fundamental_invariant_uK, isotypic_dimension, key2_bruteforce: Sym_2 invariants
- build_phiN: the level-N invariant vector on the five-part lattice
"""

from __future__ import annotations

from .invariants import (
    fundamental_invariant_uK,
    isotypic_dimension,
    key2_bruteforce,
    orthogonal_action,
    sym2,
    uK_projective_form,
    w_pm,
)
from .lattice import PhiNConstruction, build_phiN, construct_phiN
from .module import (
    FiniteQuadraticModule,
    IsotropicSubgroup,
    WeilVector,
    braid_residual,
    induce,
    invariance_residuals,
    invariant_dimension,
    restrict,
    signature_mod8,
    weil_S,
    weil_T,
)

__all__ = [
    "FiniteQuadraticModule",
    "IsotropicSubgroup",
    "PhiNConstruction",
    "WeilVector",
    "braid_residual",
    "build_phiN",
    "construct_phiN",
    "fundamental_invariant_uK",
    "induce",
    "invariance_residuals",
    "invariant_dimension",
    "isotypic_dimension",
    "key2_bruteforce",
    "orthogonal_action",
    "restrict",
    "signature_mod8",
    "sym2",
    "uK_projective_form",
    "w_pm",
    "weil_S",
    "weil_T",
]
