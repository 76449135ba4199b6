"""veriodd: compile YAML ODD/COD specifications into propositional logic
and SMT-LIB, and verify consistency and conformance with an SMT solver."""

from .engine import (
    BatchReport,
    CheckKind,
    CheckResult,
    CheckVerdict,
    DomainTooLarge,
    MissingAssignment,
    SolverConfig,
    SolverError,
    SolverGarbage,
    SolverNotFound,
    SolverOutcome,
    SolverTimeout,
    Verdict,
    brute_force_satisfiable,
    check_consistency,
    default_solver_config,
    evaluate,
    finite_domains,
    run_batch,
    run_solver,
    split_cod_stream,
    verify_cod,
)
from .model import (
    AttributeConstraint,
    AttributeDecl,
    BoolLit,
    CodSpec,
    ComparisonOp,
    GroupKind,
    ModuleDef,
    ModuleRef,
    NumericCmp,
    Observation,
    OddSpec,
    OneOf,
    OperatorGroup,
    Pos,
    ReferenceCycle,
    ScalarEq,
    Sort,
    SortConflict,
    UnitConflict,
    UnresolvedReference,
    VeriOddError,
    infer_sorts,
    inline,
    lower_module,
    resolve_and_order,
)
from .parsers import (
    Diagnostic,
    MalformedComparison,
    ParseFailure,
    Severity,
    SourceDoc,
    format_cod,
    format_odd,
    parse_cod,
    parse_constraint_value,
    parse_odd,
)
from .proplogic import emit_cod_prop, emit_odd_prop, normalize_prop
from .smtlib import (
    SmtScript,
    UnknownModule,
    assemble_script,
    emit_cod_smtlib,
    emit_odd_smtlib,
    normalize_smt,
)

__version__ = "0.1.0"
