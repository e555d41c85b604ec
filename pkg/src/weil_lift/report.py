"""JSON report models emitted by the command-line interface."""

from __future__ import annotations

import logging
from typing import Any, Literal

import mpmath as mp
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import InputValidationError

LOGGER = logging.getLogger(__name__)


def decimal(value: Any, digits: int | None = None) -> str:
    """Decimal string of a real mpmath value at the current working precision."""
    if digits is None:
        digits = max(15, int(mp.mp.dps))
    return mp.nstr(mp.mpf(value), digits)


class ReportModel(BaseModel):
    model_config = ConfigDict(frozen=True)


class ComplexValue(ReportModel):
    """A complex number as a pair of decimal strings."""

    re: str
    im: str

    @classmethod
    def of(cls, value: Any, digits: int | None = None) -> ComplexValue:
        value = mp.mpmathify(value)
        return cls(re=decimal(mp.re(value), digits), im=decimal(mp.im(value), digits))


class VectorEntry(ReportModel):
    element: list[int]
    value: ComplexValue


class SubgroupCheck(ReportModel):
    """Cardinalities of the isotropic subgroup H and its complement."""

    module_order: int
    expected_module_order: int
    h_order: int
    expected_h_order: int
    perp_order: int
    image_order: int
    isotropic: bool


class InvariantVectorReport(ReportModel):
    """The level-N invariant vector on the five-part discriminant module."""

    command: Literal["invariant-vector"] = "invariant-vector"
    D1: int
    D2: int
    N: int
    module_order: int
    support_size: int
    values: list[VectorEntry]
    residuals: dict[str, str] | None = None
    subgroup: SubgroupCheck | None = None


class ShintaniEntry(ReportModel):
    m: int
    value: ComplexValue
    error: str
    classes: int


class ShintaniReport(ReportModel):
    """Twisted traces t(m), proportional to the lift's coefficients."""

    command: Literal["shintani-lift"] = "shintani-lift"
    newform: str
    level: int
    weight: int
    twist: int
    constant: str = Field(description="the lift's normalising constant as a fraction")
    coefficients: list[ShintaniEntry]


class LFunctionReport(ReportModel):
    """An L-value with its error bound and the named factors it was assembled from."""

    command: Literal["lfunc-eval"] = "lfunc-eval"
    kind: Literal["dirichlet", "modular", "rankin-selberg", "rankin-selberg-derivative"]
    s: ComplexValue
    value: ComplexValue
    error: str
    method: str
    factors: dict[str, ComplexValue] = Field(default_factory=dict)


class NormCertificateReport(ReportModel):
    """Integrality certificate for a product of hauptmodul differences over a CM cycle."""

    command: Literal["cm-norm"] = "cm-norm"
    N: int
    D1: int
    D2: int
    nearest_integer: str
    distance: str
    product_log: str
    factors: dict[str, int]
    is_unit: bool
    bits: int
    pairs: int


class PrincipalTerm(ReportModel):
    m: int
    coefficient: str


class GreenReport(ReportModel):
    """A higher Green function summed over a CM cycle."""

    command: Literal["green"] = "green"
    k: int
    N: int
    D1: int
    D2: int
    principal: list[PrincipalTerm]
    cutoff: str
    value: ComplexValue
    tail: str
    terms: int
    pairs: int


class FormEntry(ReportModel):
    a: int
    b: int
    c: int
    genus: dict[str, int] = Field(default_factory=dict)


class ClassesReport(ReportModel):
    """Gamma_0(N)-classes of a discriminant, a debugging aid."""

    command: Literal["classes"] = "classes"
    D: int
    N: int
    class_number: int
    forms: list[FormEntry]


class CheckResult(ReportModel):
    name: str
    criterion: str
    passed: bool
    skipped: bool = False
    measured: str = ""
    detail: str = ""
    elapsed: float = Field(default=0.0, ge=0.0)


class VerifyReport(ReportModel):
    """Outcome of the acceptance suite."""

    command: Literal["verify"] = "verify"
    quick: bool
    bits: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed or check.skipped for check in self.checks)


REPORT_MODELS: dict[str, type[ReportModel]] = {
    "invariant-vector": InvariantVectorReport,
    "shintani-lift": ShintaniReport,
    "lfunc-eval": LFunctionReport,
    "cm-norm": NormCertificateReport,
    "green": GreenReport,
    "classes": ClassesReport,
    "verify": VerifyReport,
}


def report_schema(name: str) -> dict[str, Any]:
    try:
        model = REPORT_MODELS[name]
    except KeyError as exc:
        raise InputValidationError(f"unknown report {name!r}; known: {sorted(REPORT_MODELS)}") from exc
    return model.model_json_schema()
