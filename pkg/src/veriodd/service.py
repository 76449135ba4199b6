"""HTTP facade for the workbench UI.

Stateless JSON API over the compiler and verification engine.  Requests
carry specification text inline, so clients need no shared filesystem; the
solver path is fixed server-side and cannot be changed per request.  Check
and verify responses echo the exact assembled script so clients can show
the artifact that was solved.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import (
    CheckResult,
    SolverConfig,
    SolverError,
    SolverNotFound,
    SolverTimeout,
    check_consistency,
    default_solver_config,
    run_batch,
    run_solver,
    split_cod_stream,
    verify_cod,
)
from .model import OddSpec, decimal_str
from .parsers import Diagnostic, ParseFailure, parse_cod, parse_odd
from .proplogic import emit_cod_prop, emit_odd_prop
from .smtlib import UnknownModule, emit_cod_smtlib, emit_odd_smtlib


@dataclass
class ServiceSettings:
    solver: SolverConfig = field(default_factory=default_solver_config)
    max_concurrent: int = 4
    cors_origins: tuple[str, ...] = ("*",)


class ApiFault(Exception):
    """Carries an ApiError payload and its HTTP status."""

    def __init__(self, status: int, code: str, message: str,
                 diagnostics: list[Diagnostic] | None = None) -> None:
        self.status = status
        self.code = code
        self.message = message
        self.diagnostics = diagnostics
        super().__init__(message)

    def body(self) -> dict:
        payload: dict = {"code": self.code, "message": self.message}
        if self.diagnostics is not None:
            payload["diagnostics"] = [
                {"severity": d.severity.value, "message": d.message,
                 "line": d.line, "col": d.col, "snippet": d.snippet}
                for d in self.diagnostics
            ]
        return payload


class ParseRequest(BaseModel):
    odd: str
    cod: str | None = None


class CompileRequest(BaseModel):
    odd: str
    cod: str | None = None
    target: str


class CheckRequest(BaseModel):
    odd: str
    modules: list[str]
    model: bool = False


class VerifyRequest(BaseModel):
    odd: str
    cod: str
    modules: list[str]
    model: bool = False


class BatchRequest(BaseModel):
    odd: str
    cods: str
    modules: list[str]


def _parse_odd_text(text: str) -> OddSpec:
    try:
        return parse_odd(text)
    except ParseFailure as failure:
        code = "SortError" if failure.stage == "sort" else "ParseError"
        raise ApiFault(400, code, str(failure), failure.diagnostics) from None


def _parse_cod_text(text: str, odd: OddSpec):
    try:
        return parse_cod(text, odd.symbols)
    except ParseFailure as failure:
        code = "SortError" if failure.stage == "sort" else "ParseError"
        raise ApiFault(400, code, str(failure), failure.diagnostics) from None


def _require_modules(odd: OddSpec, modules: list[str]) -> list[str]:
    if not modules:
        raise ApiFault(400, "BadRequest", "at least one module must be selected")
    for name in modules:
        if name not in odd.modules:
            raise ApiFault(400, "UnknownModule", f"unknown module '{name}'")
    return modules


def _value_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return decimal_str(value)
    return str(value)


def _check_json(result: CheckResult) -> dict:
    if result.outcome.timed_out:
        raise ApiFault(504, "Timeout",
                       f"solver timed out; no verdict for "
                       f"{', '.join(result.modules)}")
    model = None
    if result.outcome.model is not None:
        model = {name: _value_text(value)
                 for name, value in result.outcome.model.items()}
    return {
        "verdict": result.verdict.label,
        "model": model,
        "wallMs": result.outcome.wall_ms,
        "script": result.script,
    }


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="veriodd", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    solver_slots = threading.Semaphore(settings.max_concurrent)

    @app.exception_handler(ApiFault)
    async def _fault_handler(_request: Request, fault: ApiFault):
        return JSONResponse(status_code=fault.status, content=fault.body())

    def _solve(callable_, *args, **kwargs):
        with solver_slots:
            try:
                return callable_(*args, **kwargs)
            except SolverNotFound as exc:
                raise ApiFault(502, "SolverError", str(exc)) from None
            except SolverTimeout as exc:
                raise ApiFault(504, "Timeout", str(exc)) from None
            except SolverError as exc:
                raise ApiFault(502, "SolverError", str(exc)) from None

    @app.post("/api/parse")
    def api_parse(request: ParseRequest) -> dict:
        odd = _parse_odd_text(request.odd)
        response = {
            "modules": [
                {"name": name, "references": module.references()}
                for name, module in odd.modules.items()
            ],
            "attributes": [
                {"name": decl.name, "sort": decl.sort.value,
                 **({"unit": decl.unit} if decl.unit else {})}
                for decl in odd.symbols.values()
            ],
        }
        if request.cod is not None:
            cod = _parse_cod_text(request.cod, odd)
            response["observations"] = [
                {"name": obs.name, "value": _value_text(obs.value)}
                for obs in cod.observations.values()
            ]
        return response

    @app.post("/api/compile")
    def api_compile(request: CompileRequest) -> dict:
        if request.target not in ("smtlib", "prop"):
            raise ApiFault(400, "BadRequest",
                           f"target must be 'smtlib' or 'prop', "
                           f"got {request.target!r}")
        odd = _parse_odd_text(request.odd)
        emit_odd = emit_odd_smtlib if request.target == "smtlib" else emit_odd_prop
        response = {"oddText": emit_odd(odd)}
        if request.cod is not None:
            cod = _parse_cod_text(request.cod, odd)
            emit = (emit_cod_smtlib if request.target == "smtlib"
                    else emit_cod_prop)
            response["codText"] = emit(cod)
        return response

    @app.post("/api/check")
    def api_check(request: CheckRequest) -> dict:
        odd = _parse_odd_text(request.odd)
        modules = _require_modules(odd, request.modules)
        result = _solve(check_consistency, odd, modules, settings.solver,
                        want_model=request.model)
        return _check_json(result)

    @app.post("/api/verify")
    def api_verify(request: VerifyRequest) -> dict:
        odd = _parse_odd_text(request.odd)
        cod = _parse_cod_text(request.cod, odd)
        modules = _require_modules(odd, request.modules)
        result = _solve(verify_cod, odd, cod, modules, settings.solver,
                        want_model=request.model)
        return _check_json(result)

    @app.post("/api/batch")
    def api_batch(request: BatchRequest) -> dict:
        odd = _parse_odd_text(request.odd)
        modules = _require_modules(odd, request.modules)
        items = []
        for text in split_cod_stream(request.cods):
            try:
                items.append(parse_cod(text, odd.symbols))
            except ParseFailure as failure:
                items.append(failure)
        report = _solve(run_batch, odd, items, modules, settings.solver)
        return {
            "rows": [
                {"index": row.index, "verdict": row.verdict,
                 "wallMs": row.wall_ms}
                for row in report.rows
            ],
            "totals": {
                "count": report.totals.count,
                "totalMs": report.totals.total_ms,
                "meanMs": report.totals.mean_ms,
                "minMs": report.totals.min_ms,
                "maxMs": report.totals.max_ms,
            },
        }

    @app.get("/api/health")
    def api_health() -> dict:
        probe = SolverConfig(executable=settings.solver.executable,
                             extra_args=settings.solver.extra_args,
                             timeout_ms=min(settings.solver.timeout_ms, 2000))
        try:
            outcome = run_solver("(check-sat)\n", probe)
            reachable = outcome.verdict.value == "sat"
        except SolverError:
            reachable = False
        return {
            "status": "ok",
            "solver": {"path": settings.solver.executable,
                       "reachable": reachable},
        }

    return app
