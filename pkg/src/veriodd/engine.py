"""Verification engine: drives an external SMT-LIB solver, interprets its
verdicts, and provides an independent brute-force satisfiability oracle
plus a batch runner for timing experiments.

The solver is an external process speaking SMT-LIB v2, launched per check
on a temporary script file: ``<executable> [extra args] <script-path>``.
The ``VERIODD_SOLVER`` environment variable overrides the default
executable; when neither it nor ``z3`` is available, the bundled fallback
solver (``veriodd.minismt``) is used.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import itertools
import math
import operator
import os
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .model import (
    And,
    BoolVar,
    Cmp,
    CodSpec,
    ComparisonOp,
    Formula,
    ModRef,
    Not,
    OddSpec,
    Or,
    StrEq,
    TrueVal,
    VeriOddError,
    inline,
    lower_module,
)
from .smtlib import SmtScript, assemble_script, parse_sexprs

# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class SolverError(VeriOddError):
    """Base class for solver launch and protocol failures."""


class SolverNotFound(SolverError):
    def __init__(self, executable: str) -> None:
        self.executable = executable
        super().__init__(f"solver executable not found: {executable}")


class SolverTimeout(SolverError):
    def __init__(self, timeout_ms: int) -> None:
        self.timeout_ms = timeout_ms
        super().__init__(f"solver timed out after {timeout_ms} ms")


class SolverGarbage(SolverError):
    def __init__(self, first_line: str, raw: str) -> None:
        self.first_line = first_line
        self.raw = raw
        super().__init__(f"unparseable solver output: {first_line!r}")


class MissingAssignment(VeriOddError):
    def __init__(self, attribute: str) -> None:
        self.attribute = attribute
        super().__init__(f"assignment does not cover attribute '{attribute}'")


class DomainTooLarge(VeriOddError):
    def __init__(self, size: int, cap: int) -> None:
        self.size = size
        self.cap = cap
        super().__init__(f"finite abstraction has {size} assignments, "
                         f"exceeding the cap of {cap}")


# ---------------------------------------------------------------------------
# Solver configuration and outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    executable: str = "z3"
    extra_args: tuple[str, ...] = ()
    timeout_ms: int = 10_000

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")


def bundled_solver_command() -> tuple[str, tuple[str, ...]]:
    """Command prefix running the bundled fallback solver in a fresh,
    site-free interpreter (fast startup)."""
    script = Path(__file__).with_name("minismt.py")
    return sys.executable, ("-S", "-E", str(script))


def default_solver_config(timeout_ms: int = 10_000) -> SolverConfig:
    """Resolve the solver: VERIODD_SOLVER, else z3 on PATH, else bundled."""
    override = os.environ.get("VERIODD_SOLVER")
    if override:
        return SolverConfig(executable=override, timeout_ms=timeout_ms)
    if shutil.which("z3"):
        return SolverConfig(executable="z3", timeout_ms=timeout_ms)
    executable, args = bundled_solver_command()
    return SolverConfig(executable=executable, extra_args=args,
                        timeout_ms=timeout_ms)


class Verdict(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


ModelValue = Union[bool, int, Fraction, str]


@dataclass(frozen=True)
class SolverOutcome:
    verdict: Verdict
    model: dict[str, ModelValue] | None
    raw: str
    wall_ms: float
    timed_out: bool = False


class CheckKind(Enum):
    CONSISTENCY = "consistency"
    CONFORMANCE = "conformance"


class CheckVerdict(Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    WITHIN_ODD = "within-odd"
    VIOLATION = "violation"
    UNKNOWN = "unknown"

    @property
    def label(self) -> str:
        return self.value


@dataclass(frozen=True)
class CheckResult:
    kind: CheckKind
    verdict: CheckVerdict
    outcome: SolverOutcome
    modules: tuple[str, ...]
    script: str


# ---------------------------------------------------------------------------
# Running the solver
# ---------------------------------------------------------------------------


def _parse_model_text(text: str) -> dict[str, ModelValue]:
    try:
        forms = parse_sexprs(text)
    except ValueError as exc:
        raise SolverGarbage(str(exc), text) from None
    model: dict[str, ModelValue] = {}

    def value_of(node) -> ModelValue:
        if isinstance(node, str):
            if node == "true":
                return True
            if node == "false":
                return False
            if node.startswith('"'):
                return node[1:-1].replace('""', '"')
            try:
                return int(node)
            except ValueError:
                pass
            try:
                return Fraction(node)
            except ValueError:
                return node
        if len(node) == 2 and node[0] == "-":
            return -value_of(node[1])  # type: ignore[operator]
        if len(node) == 3 and node[0] == "/":
            return Fraction(value_of(node[1]), value_of(node[2]))  # type: ignore[arg-type]
        raise SolverGarbage(f"unrecognized model value {node!r}", text)

    def walk(node) -> None:
        if isinstance(node, str):
            return
        if (len(node) == 5 and node[0] == "define-fun"
                and isinstance(node[1], str) and node[2] == []):
            model[node[1]] = value_of(node[4])
            return
        for child in node:
            walk(child)

    for form in forms:
        walk(form)
    return model


def run_solver(script: SmtScript | str, config: SolverConfig | None = None) -> SolverOutcome:
    """Run the external solver on a temporary script file.

    The first non-empty stdout line is the verdict; when the script asked
    for a model and the verdict is sat, the remaining output is parsed as
    ``(define-fun name () Sort value)`` bindings (a ``(model ...)`` or bare
    parenthesis wrapper and ``(- n)`` negatives are tolerated).  A nonzero
    exit status with a readable verdict is tolerated.
    """
    if config is None:
        config = default_solver_config()
    if isinstance(script, SmtScript):
        text = script.text
        want_model = script.wants_model
    else:
        text = script
        want_model = "(get-model)" in text

    fd, path = tempfile.mkstemp(suffix=".smt2", prefix="veriodd-")
    started = time.perf_counter()
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        try:
            proc = subprocess.run(
                [config.executable, *config.extra_args, path],
                capture_output=True, text=True,
                timeout=config.timeout_ms / 1000.0)
        except FileNotFoundError:
            raise SolverNotFound(config.executable) from None
        except subprocess.TimeoutExpired:
            raise SolverTimeout(config.timeout_ms) from None
    finally:
        os.unlink(path)
    wall_ms = (time.perf_counter() - started) * 1000.0

    raw = proc.stdout
    lines = [line.strip() for line in raw.splitlines()]
    first = next((line for line in lines if line), "")
    if first not in ("sat", "unsat", "unknown"):
        raise SolverGarbage(first, raw + proc.stderr)
    verdict = Verdict(first)
    model = None
    if verdict == Verdict.SAT and want_model:
        rest = raw.split(first, 1)[1]
        model = _parse_model_text(rest)
    return SolverOutcome(verdict, model, raw, wall_ms)


def _timeout_outcome(config: SolverConfig) -> SolverOutcome:
    return SolverOutcome(Verdict.UNKNOWN, None,
                         f"timeout after {config.timeout_ms} ms",
                         float(config.timeout_ms), timed_out=True)


# ---------------------------------------------------------------------------
# The two checks
# ---------------------------------------------------------------------------


def check_consistency(odd: OddSpec, modules: Sequence[str],
                      config: SolverConfig | None = None,
                      want_model: bool = False) -> CheckResult:
    """Assert the selected modules alone (no COD) to test internal
    satisfiability.  Timeouts map to the Unknown verdict."""
    config = config or default_solver_config()
    script = assemble_script(odd, None, list(modules), want_model)
    try:
        outcome = run_solver(script, config)
    except SolverTimeout:
        outcome = _timeout_outcome(config)
    verdict = {
        Verdict.SAT: CheckVerdict.CONSISTENT,
        Verdict.UNSAT: CheckVerdict.INCONSISTENT,
        Verdict.UNKNOWN: CheckVerdict.UNKNOWN,
    }[outcome.verdict]
    return CheckResult(CheckKind.CONSISTENCY, verdict, outcome,
                       tuple(modules), script.text)


def verify_cod(odd: OddSpec, cod: CodSpec, modules: Sequence[str],
               config: SolverConfig | None = None,
               want_model: bool = False) -> CheckResult:
    """Assert the selected modules together with the COD observations to
    decide whether the concrete situation satisfies the ODD."""
    config = config or default_solver_config()
    script = assemble_script(odd, cod, list(modules), want_model)
    try:
        outcome = run_solver(script, config)
    except SolverTimeout:
        outcome = _timeout_outcome(config)
    verdict = {
        Verdict.SAT: CheckVerdict.WITHIN_ODD,
        Verdict.UNSAT: CheckVerdict.VIOLATION,
        Verdict.UNKNOWN: CheckVerdict.UNKNOWN,
    }[outcome.verdict]
    return CheckResult(CheckKind.CONFORMANCE, verdict, outcome,
                       tuple(modules), script.text)


# ---------------------------------------------------------------------------
# Direct evaluation and the brute-force oracle
# ---------------------------------------------------------------------------

_CMP_FN = {
    ComparisonOp.GT: operator.gt,
    ComparisonOp.LT: operator.lt,
    ComparisonOp.GE: operator.ge,
    ComparisonOp.LE: operator.le,
    ComparisonOp.EQ: operator.eq,
    ComparisonOp.NE: operator.ne,
}


def evaluate(formula: Formula, assignment: Mapping[str, ModelValue]) -> bool:
    """Evaluate an inlined formula under a total assignment."""
    if isinstance(formula, And):
        return all(evaluate(c, assignment) for c in formula.children)
    if isinstance(formula, Or):
        return any(evaluate(c, assignment) for c in formula.children)
    if isinstance(formula, Not):
        return not evaluate(formula.child, assignment)
    if isinstance(formula, Cmp):
        value = _lookup(assignment, formula.attribute)
        if isinstance(value, bool) or isinstance(value, str):
            raise ValueError(f"attribute '{formula.attribute}' needs a "
                             "numeric value")
        return _CMP_FN[formula.op](value, formula.value)
    if isinstance(formula, StrEq):
        value = _lookup(assignment, formula.attribute)
        if not isinstance(value, str):
            raise ValueError(f"attribute '{formula.attribute}' needs a "
                             "string value")
        return value == formula.value
    if isinstance(formula, BoolVar):
        value = _lookup(assignment, formula.attribute)
        if not isinstance(value, bool):
            raise ValueError(f"attribute '{formula.attribute}' needs a "
                             "boolean value")
        return value
    if isinstance(formula, TrueVal):
        return True
    if isinstance(formula, ModRef):
        raise ValueError(f"formula must be inlined, found reference to "
                         f"'{formula.name}'")
    raise TypeError(f"unexpected formula node {formula!r}")


def _lookup(assignment: Mapping[str, ModelValue], attribute: str) -> ModelValue:
    try:
        return assignment[attribute]
    except KeyError:
        raise MissingAssignment(attribute) from None


def _collect_constants(formula: Formula,
                       nums: dict[str, list], strs: dict[str, list]) -> None:
    if isinstance(formula, (And, Or)):
        for child in formula.children:
            _collect_constants(child, nums, strs)
    elif isinstance(formula, Not):
        _collect_constants(formula.child, nums, strs)
    elif isinstance(formula, Cmp):
        bucket = nums.setdefault(formula.attribute, [])
        if formula.value not in bucket:
            bucket.append(formula.value)
    elif isinstance(formula, StrEq):
        bucket = strs.setdefault(formula.attribute, [])
        if formula.value not in bucket:
            bucket.append(formula.value)


def _fresh_sentinel(taken: Iterable[str]) -> str:
    taken = set(taken)
    candidate = "__other__"
    while candidate in taken:
        candidate += "_"
    return candidate


def finite_domains(odd: OddSpec, formulas: Sequence[Formula],
                   cod: CodSpec | None = None) -> dict[str, list[ModelValue]]:
    """Per-attribute finite domains that make enumeration an exact oracle:
    boundary probes around every comparison constant, occurring string
    literals plus a fresh sentinel, both boolean values."""
    nums: dict[str, list] = {}
    strs: dict[str, list] = {}
    for formula in formulas:
        _collect_constants(formula, nums, strs)

    domains: dict[str, list[ModelValue]] = {}
    attrs: dict[str, None] = {}
    for formula in formulas:
        for attr in _formula_attrs(formula):
            attrs.setdefault(attr, None)
    for attr in attrs:
        observed = cod.observations.get(attr) if cod is not None else None
        if observed is not None:
            domains[attr] = [observed.value]
            continue
        sort = odd.symbols[attr].sort
        if sort.name == "BOOL":
            domains[attr] = [True, False]
        elif sort.name == "STR":
            literals = strs.get(attr, [])
            domains[attr] = list(literals) + [_fresh_sentinel(literals)]
        else:
            offset = 1 if sort.name == "INT" else Fraction(1, 2)
            constants = sorted(set(nums.get(attr, [0])))
            probes = set()
            for constant in constants:
                probes.update((constant - offset, constant, constant + offset))
            if sort.name == "REAL":
                # Adjacent constants can lie closer than the +-1/2 probes;
                # midpoints make the interval coverage exact.
                for low, high in zip(constants, constants[1:]):
                    probes.add(Fraction(low + high, 2))
            domains[attr] = sorted(probes)
    return domains


def _formula_attrs(formula: Formula) -> list[str]:
    out: dict[str, None] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, (And, Or)):
            for child in f.children:
                walk(child)
        elif isinstance(f, Not):
            walk(f.child)
        elif isinstance(f, (Cmp, StrEq, BoolVar)):
            out.setdefault(f.attribute, None)

    walk(formula)
    return list(out)


def brute_force_satisfiable(odd: OddSpec, cod: CodSpec | None,
                            modules: Sequence[str],
                            cap: int = 10_000_000) -> bool:
    """Exact enumeration oracle over the finite abstraction.

    Comparisons against constants partition each numeric line into
    intervals, and the +-1 (Int) / +-1/2 (Real) probes hit every interval
    the occurring constants induce, so agreement with a solver verdict is
    exact for this constraint language.  Raises DomainTooLarge when the
    product of domain sizes exceeds ``cap``.
    """
    formulas = [inline(lower_module(odd.modules[name], odd), odd)
                for name in modules]
    domains = finite_domains(odd, formulas, cod)
    attrs = list(domains)
    size = math.prod(len(domains[a]) for a in attrs) if attrs else 1
    if size > cap:
        raise DomainTooLarge(size, cap)
    for combo in itertools.product(*(domains[a] for a in attrs)):
        assignment = dict(zip(attrs, combo))
        if all(evaluate(f, assignment) for f in formulas):
            return True
    return False


# ---------------------------------------------------------------------------
# Batch verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BatchRow:
    index: int
    verdict: str
    wall_ms: float


@dataclass(frozen=True)
class BatchTotals:
    count: int
    total_ms: float
    mean_ms: float
    min_ms: float
    max_ms: float


@dataclass(frozen=True)
class BatchReport:
    rows: tuple[BatchRow, ...]
    totals: BatchTotals

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["index", "verdict", "wall_ms"])
        for row in self.rows:
            writer.writerow([row.index, row.verdict, f"{row.wall_ms:.3f}"])
        return buffer.getvalue()


def _batch_totals(rows: Sequence[BatchRow]) -> BatchTotals:
    if not rows:
        return BatchTotals(0, 0.0, 0.0, 0.0, 0.0)
    times = [row.wall_ms for row in rows]
    return BatchTotals(len(rows), sum(times), sum(times) / len(times),
                       min(times), max(times))


def run_batch(odd: OddSpec, cods: Iterable[CodSpec | Exception],
              modules: Sequence[str],
              config: SolverConfig | None = None,
              workers: int = 1) -> BatchReport:
    """Verify each COD with a fresh solver process.

    Per-COD wall time covers translation, script assembly, and the solver
    run.  Items that are exceptions (e.g. pre-recorded parse failures)
    become error rows; per-row solver errors are recorded and the batch
    continues.  Worker parallelism never reorders the report rows.
    """
    config = config or default_solver_config()
    module_list = list(modules)

    def job(item: tuple[int, CodSpec | Exception]) -> BatchRow:
        index, cod = item
        if isinstance(cod, Exception):
            return BatchRow(index, f"error: {cod}", 0.0)
        started = time.perf_counter()
        try:
            script = assemble_script(odd, cod, module_list, want_model=False)
            outcome = run_solver(script, config)
        except SolverTimeout:
            return BatchRow(index, CheckVerdict.UNKNOWN.label,
                            (time.perf_counter() - started) * 1000.0)
        except VeriOddError as exc:
            return BatchRow(index, f"error: {exc}",
                            (time.perf_counter() - started) * 1000.0)
        wall = (time.perf_counter() - started) * 1000.0
        verdict = {
            Verdict.SAT: CheckVerdict.WITHIN_ODD,
            Verdict.UNSAT: CheckVerdict.VIOLATION,
            Verdict.UNKNOWN: CheckVerdict.UNKNOWN,
        }[outcome.verdict]
        return BatchRow(index, verdict.label, wall)

    items = enumerate(cods)
    if workers <= 1:
        rows = [job(item) for item in items]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, items))
    return BatchReport(tuple(rows), _batch_totals(rows))


# ---------------------------------------------------------------------------
# Batch COD input formats
# ---------------------------------------------------------------------------


def split_cod_stream(text: str) -> list[str]:
    """Split a stream file into COD documents on lines of exactly ``---``."""
    docs: list[list[str]] = [[]]
    for line in text.split("\n"):
        if line.strip() == "---":
            docs.append([])
        else:
            docs[-1].append(line)
    texts = ["\n".join(doc).strip("\n") for doc in docs]
    # Separator fenceposts: ignore empty documents at either end.
    while texts and not texts[0].strip():
        texts.pop(0)
    while texts and not texts[-1].strip():
        texts.pop()
    return texts
