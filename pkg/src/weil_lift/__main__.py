"""CLI entrypoint for weillift."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from importlib import metadata
import json
import logging
from pathlib import Path
import sys
from typing import Any

import mpmath as mp

from .bqf import class_group, gamma0_classes, genus_char_prime, heegner_points
from .cmvalues import cm_cycle, cm_norm, green_on_cycle
from .config import CONFIG_PATH, load_config, write_default_config
from .exceptions import InputValidationError, PrecisionError, WeilLiftError
from .lfunc import (
    dirichlet_L,
    modular_L,
    rankin_selberg_derivative,
    rankin_selberg_L,
)
from .logging_utils import configure_logging
from .numtheory import is_fundamental, prime_divisors
from .precision import resolve_bits, working_precision
from .qexp import Newform, builtin_newform
from .report import (
    REPORT_MODELS,
    ClassesReport,
    ComplexValue,
    FormEntry,
    GreenReport,
    InvariantVectorReport,
    LFunctionReport,
    NormCertificateReport,
    PrincipalTerm,
    ReportModel,
    ShintaniEntry,
    ShintaniReport,
    SubgroupCheck,
    VectorEntry,
    decimal,
    report_schema,
)
from .shintani import shintani_coefficients, shintani_constant
from .verify import CHECKS, render, run_checks
from .weil import construct_phiN, invariance_residuals

LOGGER = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3


def _complex(text: str) -> mp.mpc:
    """'x' or 'x,y' for x + iy, kept at full precision."""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) > 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")
    try:
        return mp.mpc(parts[0], parts[1] if len(parts) == 2 else 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _principal(text: str) -> list[tuple[int, str]]:
    """'m:c,m:c' for the principal part sum c q^-m."""
    terms = []
    for chunk in text.split(","):
        m, sep, c = chunk.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected 'm:c' pairs, got {chunk!r}")
        try:
            terms.append((int(m), c.strip()))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad principal-part index {m!r}") from exc
    return terms


def _add_newform_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--newform", type=Path, help="newform JSON file")
    source.add_argument("--builtin", default="3.6", help="built-in newform: delta or 3.6 (default)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weillift",
        description="Weil-representation invariants, twisted Shintani lifts, L-values and CM norms",
    )
    parser.add_argument("--version", action="store_true", help="Print version and exit")
    parser.add_argument("--config", type=Path, default=None, help=f"config file (default {CONFIG_PATH})")
    parser.add_argument("--prec", type=int, default=None, help="working precision in bits")
    parser.add_argument("--threads", type=int, default=None, help="worker processes")
    parser.add_argument("--output", type=Path, default=None, help="write JSON here instead of stdout")
    parser.add_argument(
        "--log-level",
        choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        default=None,
        help="override the configured log level",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    vector = commands.add_parser("invariant-vector", help="the level-N invariant vector")
    vector.add_argument("--D1", type=int, required=True)
    vector.add_argument("--D2", type=int, required=True)
    vector.add_argument("--N", type=int, default=1)
    vector.add_argument("--check", action="store_true", help="also emit invariance residuals and |H| checks")

    lift = commands.add_parser("shintani-lift", help="twisted traces of a newform")
    _add_newform_arguments(lift)
    lift.add_argument("--twist", type=int, required=True)
    lift.add_argument("--m-list", type=_int_list, required=True, help="comma-separated indices")
    lift.add_argument("--parity", type=int, choices=[0, 1], default=None)

    lfunc = commands.add_parser("lfunc-eval", help="Dirichlet, modular or Rankin-Selberg L-values")
    lfunc.add_argument(
        "--kind",
        choices=["dirichlet", "modular", "rankin-selberg", "rankin-selberg-derivative"],
        default="dirichlet",
    )
    lfunc.add_argument("--s", type=_complex, default=mp.mpc(0), help="'re' or 're,im'")
    lfunc.add_argument("--D", type=int, default=-4, help="character discriminant")
    lfunc.add_argument("--method", choices=["afe", "hurwitz"], default="afe")
    _add_newform_arguments(lfunc)
    lfunc.add_argument("--fricke", type=int, choices=[-1, 1], default=None, help="override the Fricke sign")
    lfunc.add_argument("--D1", type=int, default=-11)
    lfunc.add_argument("--D2", type=int, default=-8)
    lfunc.add_argument("--N", type=int, default=None)
    lfunc.add_argument("--N3", type=int, default=1)
    lfunc.add_argument("--cutoff", type=_complex, default=None)

    norm = commands.add_parser("cm-norm", help="norm of hauptmodul differences over a CM cycle")
    norm.add_argument("--N", type=int, default=1)
    norm.add_argument("--D1", type=int, required=True)
    norm.add_argument("--D2", type=int, required=True)
    norm.add_argument("--shift", type=int, default=0)

    green = commands.add_parser("green", help="higher Green function summed over a CM cycle")
    green.add_argument("--k", type=int, required=True)
    green.add_argument("--N", type=int, default=1)
    green.add_argument("--D1", type=int, required=True)
    green.add_argument("--D2", type=int, required=True)
    green.add_argument("--principal", type=_principal, default=[(1, "1")], help="'m:c,...' for sum c q^-m")
    green.add_argument("--cutoff", type=float, default=64.0)

    verify = commands.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("--quick", action="store_true", help="skip the long cases")
    verify.add_argument("--only", nargs="+", choices=[entry.name for entry in CHECKS], default=None)

    init = commands.add_parser("init-config", help="write the default configuration")
    init.add_argument("--path", type=Path, default=None)
    init.add_argument("--force", action="store_true")

    schema = commands.add_parser("schema", help="print the JSON schema of a report")
    schema.add_argument("report", choices=sorted(REPORT_MODELS))

    classes = commands.add_parser("classes", help="list classes and genus characters of a discriminant")
    classes.add_argument("--D", type=int, required=True)
    classes.add_argument("--N", type=int, default=1)
    return parser


def _newform(args: argparse.Namespace, settings: dict[str, Any]) -> Newform:
    if args.newform:
        form = Newform.from_json(args.newform)
    else:
        form = builtin_newform(args.builtin, bound=settings["series"]["truncation"])
    if getattr(args, "fricke", None) is not None:
        form = form.with_fricke(args.fricke)
    return form


def _cmd_invariant_vector(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    construction = construct_phiN(args.D1, args.D2, args.N)
    vector = construction.vector
    residuals = None
    subgroup = None
    if args.check:
        found = invariance_residuals(vector, dense_limit=settings["weil"]["dense_limit"])
        residuals = {name: decimal(value, 10) for name, value in found.items()}
        H = construction.subgroup
        subgroup = SubgroupCheck(
            module_order=construction.module.order,
            expected_module_order=args.N**4 * abs(args.D1) ** 3 * args.D2**2,
            h_order=H.order,
            expected_h_order=construction.expected_h_order,
            perp_order=H.perp_order,
            image_order=H.perp_order // H.order,
            isotropic=all(construction.module.is_isotropic(h) for h in H.elements),
        )
    return InvariantVectorReport(
        D1=args.D1,
        D2=args.D2,
        N=args.N,
        module_order=construction.module.order,
        support_size=len(vector.support()),
        values=[VectorEntry(element=list(x), value=ComplexValue.of(vector.values[x])) for x in vector.support()],
        residuals=residuals,
        subgroup=subgroup,
    )


def _cmd_shintani(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    G = _newform(args, settings)
    quadrature = settings["quadrature"]
    traces = shintani_coefficients(
        G,
        args.twist,
        args.m_list,
        threads=settings["workers"]["threads"],
        parity=args.parity,
        order=quadrature["order"],
        tolerance=quadrature["tolerance"],
    )
    return ShintaniReport(
        newform=G.label or f"{G.level}.{G.weight}",
        level=G.level,
        weight=int(G.weight),
        twist=args.twist,
        constant=str(shintani_constant(int(G.weight) // 2)),
        coefficients=[
            ShintaniEntry(m=t.index, value=ComplexValue.of(t.value), error=decimal(t.error, 5), classes=t.classes)
            for t in traces
        ],
    )


def _cmd_lfunc(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    threads = settings["workers"]["threads"]
    if args.kind == "dirichlet":
        result = dirichlet_L(args.D, args.s, method=args.method)
    elif args.kind == "modular":
        cutoff = {} if args.cutoff is None else {"cutoff": mp.re(args.cutoff)}
        result = modular_L(_newform(args, settings), args.s, **cutoff)
    elif args.kind == "rankin-selberg":
        result = rankin_selberg_L(
            _newform(args, settings), args.D1, args.D2, args.s, N=args.N, N3=args.N3, threads=threads
        )
    else:
        result = rankin_selberg_derivative(
            _newform(args, settings), args.D1, args.D2, args.s, N=args.N, N3=args.N3, threads=threads
        )
    return LFunctionReport(
        kind=args.kind,
        s=ComplexValue.of(args.s),
        value=ComplexValue.of(result.value),
        error=decimal(result.error, 5),
        method=result.method,
        factors={name: ComplexValue.of(value) for name, value in result.factors.items()},
    )


def _cmd_cm_norm(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    precision = settings["precision"]
    certificate = cm_norm(
        args.N,
        args.D1,
        args.D2,
        bits=max(precision["cm_start_bits"], mp.mp.prec),
        headroom=precision["cm_headroom_bits"],
        threads=settings["workers"]["threads"],
        shift=args.shift,
    )
    return NormCertificateReport(
        N=certificate.N,
        D1=certificate.D1,
        D2=certificate.D2,
        nearest_integer=str(certificate.nearest),
        distance=decimal(certificate.distance, 5),
        product_log=decimal(certificate.product_log, 20),
        factors={str(p): e for p, e in certificate.factors.items()},
        is_unit=certificate.is_unit,
        bits=certificate.bits,
        pairs=certificate.pairs,
    )


def _cmd_green(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    cycle = cm_cycle(args.D1, args.D2, args.N)
    principal = [(m, mp.mpf(c)) for m, c in args.principal]
    value = green_on_cycle(args.k, principal, args.N, cycle, args.cutoff, settings["workers"]["threads"])
    return GreenReport(
        k=args.k,
        N=args.N,
        D1=args.D1,
        D2=args.D2,
        principal=[PrincipalTerm(m=m, coefficient=c) for m, c in args.principal],
        cutoff=str(args.cutoff),
        value=ComplexValue.of(value.value),
        tail=decimal(value.tail, 5),
        terms=value.terms,
        pairs=len(cycle),
    )


def _genus(D: int, form: Any) -> dict[str, int]:
    if not is_fundamental(D) or not form.is_primitive:
        return {}
    return {str(p): genus_char_prime(p, form) for p in prime_divisors(abs(D)) if p != 2}


def _cmd_classes(args: argparse.Namespace, settings: dict[str, Any]) -> ReportModel:
    if args.D < 0:
        if args.N == 1:
            forms = class_group(args.D).forms
        else:
            forms = tuple(point.form for point in heegner_points(args.D, args.N))
    else:
        forms = gamma0_classes(args.D, args.N)
    return ClassesReport(
        D=args.D,
        N=args.N,
        class_number=len(forms),
        forms=[FormEntry(a=f.a, b=f.b, c=f.c, genus=_genus(args.D, f)) for f in forms],
    )


COMMANDS = {
    "invariant-vector": _cmd_invariant_vector,
    "shintani-lift": _cmd_shintani,
    "lfunc-eval": _cmd_lfunc,
    "cm-norm": _cmd_cm_norm,
    "green": _cmd_green,
    "classes": _cmd_classes,
}


def _emit(text: str, target: Path | None) -> None:
    if target is None:
        sys.stdout.write(text + "\n")
        return
    target.expanduser().write_text(text + "\n", encoding="utf-8")
    LOGGER.info("cli.output", extra={"event": "cli.output", "path": str(target)})


def _version() -> str:
    try:
        return metadata.version("weillift")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, load configuration and dispatch to a subcommand."""

    parser = _build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)

    if args.version:
        print(f"weillift {_version()}")
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    settings = load_config(args.config)
    if args.log_level:
        settings["logging"]["level"] = args.log_level
    configure_logging(settings["logging"])
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be at least 1")
        settings["workers"]["threads"] = args.threads
    target = args.output
    if target is None and settings["output"]["path"]:
        target = Path(settings["output"]["path"])
    indent = settings["output"]["indent"] or None

    try:
        bits = resolve_bits(args.prec, settings)
        if args.command == "init-config":
            path = write_default_config(args.path, overwrite=args.force)
            print(path)
            return 0
        if args.command == "schema":
            _emit(json.dumps(report_schema(args.report), indent=indent), target)
            return 0
        with working_precision(bits):
            if args.command == "verify":
                report = run_checks(quick=args.quick, bits=bits, selected=args.only)
                render(report)
                _emit(report.model_dump_json(indent=indent), target)
                return 0 if report.passed else EXIT_FAILURE
            report = COMMANDS[args.command](args, settings)
        _emit(report.model_dump_json(indent=indent), target)
    except InputValidationError as exc:
        print(f"weillift: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"weillift: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except WeilLiftError as exc:
        print(f"weillift: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
