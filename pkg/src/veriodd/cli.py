"""Command-line interface: compile, check, verify, batch, serve.

Exit codes follow sysexits conventions: 0 success / consistent / within
the ODD, 3 inconsistent or violation, 4 unknown verdict, 64 usage error,
65 malformed input data, 66 unreadable file, 69 solver unavailable.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .engine import (
    CheckResult,
    CheckVerdict,
    SolverConfig,
    SolverError,
    SolverNotFound,
    check_consistency,
    default_solver_config,
    run_batch,
    split_cod_stream,
    verify_cod,
)
from .model import OddSpec, decimal_str
from .parsers import ParseFailure, SourceDoc, parse_cod, parse_odd
from .proplogic import emit_cod_prop, emit_odd_prop
from .smtlib import emit_cod_smtlib, emit_odd_smtlib

EXIT_OK = 0
EXIT_NEGATIVE = 3
EXIT_UNKNOWN = 4
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66
EXIT_UNAVAILABLE = 69


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _ArgumentParser:
    solver_opts = _ArgumentParser(add_help=False)
    solver_opts.add_argument(
        "--solver", metavar="PATH",
        help="solver executable (default: $VERIODD_SOLVER, then z3 on PATH, "
             "then the bundled fallback solver)")
    solver_opts.add_argument("--timeout-ms", type=int, default=10_000,
                             help="solver timeout in milliseconds")

    parser = _ArgumentParser(
        prog="veriodd",
        description="Compile ODD/COD documents to propositional logic and "
                    "SMT-LIB, and run solver-based consistency and "
                    "conformance checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser("compile", help="translate documents")
    p_compile.add_argument("--odd", required=True, metavar="FILE")
    p_compile.add_argument("--cod", metavar="FILE")
    p_compile.add_argument("--target", required=True,
                           choices=("smtlib", "prop"))
    p_compile.add_argument("--output", "-o", metavar="FILE",
                           help="write here instead of stdout")

    p_check = sub.add_parser("check", parents=[solver_opts],
                             help="ODD consistency check (no COD)")
    p_check.add_argument("--odd", required=True, metavar="FILE")
    p_check.add_argument("--modules", metavar="NAMES",
                         help="comma-separated module names "
                              "(default: the unique top-level module)")
    p_check.add_argument("--model", action="store_true",
                         help="print a witness assignment when satisfiable")

    p_verify = sub.add_parser("verify", parents=[solver_opts],
                              help="situation verification (with COD)")
    p_verify.add_argument("--odd", required=True, metavar="FILE")
    p_verify.add_argument("--cod", required=True, metavar="FILE")
    p_verify.add_argument("--modules", metavar="NAMES")
    p_verify.add_argument("--model", action="store_true")

    p_batch = sub.add_parser("batch", parents=[solver_opts],
                             help="verify many CODs, one solver run each")
    p_batch.add_argument("--odd", required=True, metavar="FILE")
    p_batch.add_argument("--cods", required=True, metavar="PATH",
                         help="directory of .yaml files or one stream file "
                              "with '---' separators")
    p_batch.add_argument("--modules", metavar="NAMES")
    p_batch.add_argument("--csv", metavar="FILE",
                         help="write the report here instead of stdout")
    p_batch.add_argument("--workers", type=int, default=1)

    p_serve = sub.add_parser("serve", parents=[solver_opts],
                             help="run the HTTP verification service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--max-solvers", type=int, default=4,
                         help="cap on concurrent solver processes")
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


class _Failure(Exception):
    def __init__(self, code: int) -> None:
        self.code = code


def _read_file(path: str) -> SourceDoc:
    try:
        return SourceDoc(Path(path).read_text(encoding="utf-8"), origin=path)
    except OSError as exc:
        print(f"veriodd: cannot read {path}: {exc.strerror or exc}",
              file=sys.stderr)
        raise _Failure(EXIT_NOINPUT) from None


def _report_diagnostics(failure: ParseFailure, origin: str) -> None:
    for diagnostic in failure.diagnostics:
        print(diagnostic.render(origin), file=sys.stderr)


def _parse_odd_doc(doc: SourceDoc) -> OddSpec:
    try:
        return parse_odd(doc)
    except ParseFailure as failure:
        _report_diagnostics(failure, doc.origin)
        raise _Failure(EXIT_DATA) from None


def _parse_cod_doc(doc: SourceDoc, odd: OddSpec):
    try:
        return parse_cod(doc, odd.symbols)
    except ParseFailure as failure:
        _report_diagnostics(failure, doc.origin)
        raise _Failure(EXIT_DATA) from None


def default_modules(odd: OddSpec) -> list[str]:
    """The unique sink of the reference DAG, when one exists."""
    referenced: set[str] = set()
    for module in odd.modules.values():
        referenced.update(module.references())
    sinks = [name for name in odd.modules if name not in referenced]
    return sinks if len(sinks) == 1 else []


def _resolve_modules(odd: OddSpec, spec: str | None) -> list[str]:
    if spec:
        names = [name.strip() for name in spec.split(",") if name.strip()]
        if not names:
            raise _UsageError("--modules must name at least one module")
        for name in names:
            if name not in odd.modules:
                raise _UsageError(f"unknown module '{name}'")
        return names
    names = default_modules(odd)
    if not names:
        raise _UsageError(
            "--modules is required: the ODD has no unique top-level module")
    return names


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    if args.solver:
        return SolverConfig(executable=args.solver,
                            timeout_ms=args.timeout_ms)
    return default_solver_config(timeout_ms=args.timeout_ms)


def _render_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return decimal_str(value)
    return str(value)


def _print_check_result(result: CheckResult, want_model: bool) -> int:
    print(result.verdict.label)
    if want_model and result.outcome.model is not None:
        for name, value in result.outcome.model.items():
            print(f"{name} = {_render_value(value)}")
    if result.verdict in (CheckVerdict.CONSISTENT, CheckVerdict.WITHIN_ODD):
        return EXIT_OK
    if result.verdict == CheckVerdict.UNKNOWN:
        return EXIT_UNKNOWN
    return EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_compile(args: argparse.Namespace) -> int:
    odd_doc = _read_file(args.odd)
    odd = _parse_odd_doc(odd_doc)
    if args.target == "smtlib":
        output = emit_odd_smtlib(odd)
    else:
        output = emit_odd_prop(odd)
    if args.cod:
        cod_doc = _read_file(args.cod)
        cod = _parse_cod_doc(cod_doc, odd)
        emitted = (emit_cod_smtlib(cod) if args.target == "smtlib"
                   else emit_cod_prop(cod))
        output = output + "\n" + emitted
    if args.output:
        try:
            Path(args.output).write_text(output, encoding="utf-8")
        except OSError as exc:
            print(f"veriodd: cannot write {args.output}: {exc.strerror or exc}",
                  file=sys.stderr)
            return EXIT_NOINPUT
    else:
        sys.stdout.write(output)
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    odd = _parse_odd_doc(_read_file(args.odd))
    modules = _resolve_modules(odd, args.modules)
    result = check_consistency(odd, modules, _solver_config(args),
                               want_model=args.model)
    return _print_check_result(result, args.model)


def _cmd_verify(args: argparse.Namespace) -> int:
    odd = _parse_odd_doc(_read_file(args.odd))
    cod = _parse_cod_doc(_read_file(args.cod), odd)
    modules = _resolve_modules(odd, args.modules)
    result = verify_cod(odd, cod, modules, _solver_config(args),
                        want_model=args.model)
    return _print_check_result(result, args.model)


def _load_cods(args: argparse.Namespace, odd: OddSpec) -> list:
    """CODs from a directory (lexicographic *.yaml) or a '---' stream file.

    Parse failures become per-row error entries instead of aborting."""
    path = Path(args.cods)
    items: list = []
    if path.is_dir():
        for file in sorted(path.glob("*.yaml")):
            doc = SourceDoc(file.read_text(encoding="utf-8"), origin=str(file))
            items.append(_cod_or_failure(doc, odd))
    else:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"veriodd: cannot read {path}: {exc.strerror or exc}",
                  file=sys.stderr)
            raise _Failure(EXIT_NOINPUT) from None
        for index, doc_text in enumerate(split_cod_stream(text)):
            doc = SourceDoc(doc_text, origin=f"{path}#{index}")
            items.append(_cod_or_failure(doc, odd))
    return items


def _cod_or_failure(doc: SourceDoc, odd: OddSpec):
    try:
        return parse_cod(doc, odd.symbols)
    except ParseFailure as failure:
        return failure


def _cmd_batch(args: argparse.Namespace) -> int:
    odd = _parse_odd_doc(_read_file(args.odd))
    modules = _resolve_modules(odd, args.modules)
    items = _load_cods(args, odd)
    report = run_batch(odd, items, modules, _solver_config(args),
                       workers=args.workers)
    csv_text = report.to_csv()
    totals = report.totals
    summary = (f"cods={totals.count} total_ms={totals.total_ms:.1f} "
               f"mean_ms={totals.mean_ms:.2f} min_ms={totals.min_ms:.2f} "
               f"max_ms={totals.max_ms:.2f}")
    if args.csv:
        try:
            Path(args.csv).write_text(csv_text, encoding="utf-8")
        except OSError as exc:
            print(f"veriodd: cannot write {args.csv}: {exc.strerror or exc}",
                  file=sys.stderr)
            return EXIT_NOINPUT
        print(summary)
    else:
        sys.stdout.write(csv_text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app

    settings = ServiceSettings(solver=_solver_config(args),
                               max_concurrent=args.max_solvers)
    uvicorn.run(create_app(settings), host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "compile": _cmd_compile,
    "check": _cmd_check,
    "verify": _cmd_verify,
    "batch": _cmd_batch,
    "serve": _cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"veriodd: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _Failure as failure:
        return failure.code
    except SolverNotFound as exc:
        print(f"veriodd: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except SolverError as exc:
        print(f"veriodd: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
