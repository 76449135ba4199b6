import os
import stat
import time
from fractions import Fraction

import pytest

from veriodd import parse_cod, parse_odd
from veriodd.engine import (
    CheckKind,
    CheckVerdict,
    DomainTooLarge,
    MissingAssignment,
    SolverConfig,
    SolverGarbage,
    SolverNotFound,
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
from veriodd.model import (
    And,
    BoolVar,
    Cmp,
    ComparisonOp,
    Not,
    Or,
    StrEq,
    inline,
    lower_module,
)
from veriodd.smtlib import assemble_script

CONTRADICTORY_ODD = """\
a:
  INCLUDE_AND:
    x: > 5
b:
  INCLUDE_AND:
    x: < 3
c:
  INCLUDE_AND:
    - a
    - b
"""


def fake_solver(tmp_path, name: str, body: str) -> str:
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


# ---------------------------------------------------------------------------
# run_solver
# ---------------------------------------------------------------------------


def test_running_example_is_unsat(parking_odd, parking_cod, solver_config):
    script = assemble_script(parking_odd, parking_cod,
                             ["parking_lot_conditions"])
    assert run_solver(script, solver_config).verdict == Verdict.UNSAT


def test_supported_alone_is_sat(parking_odd, solver_config):
    script = assemble_script(parking_odd, None,
                             ["supported_parking_lot_conditions"])
    assert run_solver(script, solver_config).verdict == Verdict.SAT


def test_empty_script_is_sat(solver_config):
    assert run_solver("(check-sat)\n", solver_config).verdict == Verdict.SAT


def test_solver_not_found():
    config = SolverConfig(executable="/nonexistent/solver-binary")
    with pytest.raises(SolverNotFound):
        run_solver("(check-sat)\n", config)


def test_solver_timeout_and_grace(tmp_path):
    slow = fake_solver(tmp_path, "slow.sh", "sleep 30\necho sat\n")
    config = SolverConfig(executable=slow, timeout_ms=300)
    started = time.perf_counter()
    with pytest.raises(SolverTimeout):
        run_solver("(check-sat)\n", config)
    elapsed_ms = (time.perf_counter() - started) * 1000
    assert elapsed_ms < 300 + 500


def test_solver_garbage(tmp_path):
    noisy = fake_solver(tmp_path, "noisy.sh", "echo flubber\n")
    config = SolverConfig(executable=noisy)
    with pytest.raises(SolverGarbage) as info:
        run_solver("(check-sat)\n", config)
    assert "flubber" in info.value.raw


def test_nonzero_exit_with_verdict_tolerated(tmp_path):
    grumpy = fake_solver(tmp_path, "grumpy.sh", "echo unsat\nexit 1\n")
    config = SolverConfig(executable=grumpy)
    assert run_solver("(check-sat)\n", config).verdict == Verdict.UNSAT


def test_unknown_verdict_passes_through(tmp_path):
    shrug = fake_solver(tmp_path, "shrug.sh", "echo unknown\n")
    config = SolverConfig(executable=shrug)
    assert run_solver("(check-sat)\n", config).verdict == Verdict.UNKNOWN


def test_model_parsing_with_wrapper_and_negatives(tmp_path):
    body = ("cat <<'MODEL'\n"
            "sat\n"
            "(model\n"
            "  (define-fun count () Int (- 7))\n"
            "  (define-fun width () Real (/ 3 2))\n"
            "  (define-fun dark () Bool true)\n"
            '  (define-fun name () String "snow ""deep"" x")\n'
            ")\n"
            "MODEL\n")
    solver = fake_solver(tmp_path, "modelful.sh", body)
    config = SolverConfig(executable=solver)
    outcome = run_solver("(check-sat)\n(get-model)\n", config)
    assert outcome.model == {
        "count": -7,
        "width": Fraction(3, 2),
        "dark": True,
        "name": 'snow "deep" x',
    }


def test_model_not_requested_not_parsed(parking_odd, solver_config):
    script = assemble_script(parking_odd, None,
                             ["supported_parking_lot_conditions"],
                             want_model=False)
    assert run_solver(script, solver_config).model is None


def test_bundled_model_roundtrip(parking_odd, solver_config):
    script = assemble_script(parking_odd, None,
                             ["supported_parking_lot_conditions"],
                             want_model=True)
    outcome = run_solver(script, solver_config)
    assert outcome.verdict == Verdict.SAT
    formula = inline(lower_module(
        parking_odd.modules["supported_parking_lot_conditions"], parking_odd),
        parking_odd)
    assert evaluate(formula, outcome.model) is True


# ---------------------------------------------------------------------------
# check_consistency / verify_cod
# ---------------------------------------------------------------------------


def test_consistency_running_example(parking_odd, solver_config):
    result = check_consistency(parking_odd, ["parking_lot_conditions"],
                               solver_config)
    assert result.kind == CheckKind.CONSISTENCY
    assert result.verdict == CheckVerdict.CONSISTENT
    # Independent confirmation by the brute-force oracle.
    assert brute_force_satisfiable(parking_odd, None,
                                   ["parking_lot_conditions"]) is True


def test_inconsistent_composite(solver_config):
    odd = parse_odd(CONTRADICTORY_ODD)
    result = check_consistency(odd, ["c"], solver_config)
    assert result.verdict == CheckVerdict.INCONSISTENT


def test_multiple_selection_conjunction(solver_config):
    odd = parse_odd(CONTRADICTORY_ODD)
    result = check_consistency(odd, ["a", "b"], solver_config)
    assert result.verdict == CheckVerdict.INCONSISTENT
    assert result.modules == ("a", "b")


def test_verify_running_example(parking_odd, parking_cod, solver_config):
    result = verify_cod(parking_odd, parking_cod,
                        ["parking_lot_conditions"], solver_config)
    assert result.kind == CheckKind.CONFORMANCE
    assert result.verdict == CheckVerdict.VIOLATION


def test_verify_supported_within_odd(parking_odd, parking_cod, solver_config):
    result = verify_cod(parking_odd, parking_cod,
                        ["supported_parking_lot_conditions"], solver_config)
    assert result.verdict == CheckVerdict.WITHIN_ODD


def test_verify_empty_cod_degenerates_to_consistency(parking_odd, solver_config):
    cod = parse_cod("", parking_odd.symbols)
    result = verify_cod(parking_odd, cod, ["parking_lot_conditions"],
                        solver_config)
    assert result.verdict == CheckVerdict.WITHIN_ODD


def test_timeout_maps_to_unknown(tmp_path, parking_odd):
    slow = fake_solver(tmp_path, "slow.sh", "sleep 30\necho sat\n")
    config = SolverConfig(executable=slow, timeout_ms=200)
    result = check_consistency(parking_odd, ["parking_lot_conditions"], config)
    assert result.verdict == CheckVerdict.UNKNOWN
    assert result.outcome.timed_out


def test_check_result_carries_script(parking_odd, solver_config):
    result = check_consistency(parking_odd, ["parking_lot_conditions"],
                               solver_config)
    assert "(check-sat)" in result.script
    assert "(assert parking_lot_conditions)" in result.script


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def test_evaluate_supported_formula(parking_odd):
    formula = inline(lower_module(
        parking_odd.modules["supported_parking_lot_conditions"], parking_odd),
        parking_odd)
    assert evaluate(formula, {"parking_lot_length": 13, "is_curve": True})
    assert not evaluate(formula, {"parking_lot_length": 12, "is_curve": True})


def test_evaluate_composite_under_running_cod(parking_odd, parking_cod):
    formula = inline(lower_module(
        parking_odd.modules["parking_lot_conditions"], parking_odd),
        parking_odd)
    assignment = {name: obs.value
                  for name, obs in parking_cod.observations.items()}
    assert evaluate(formula, assignment) is False


def test_evaluate_not():
    assert evaluate(Not(BoolVar("x")), {"x": False}) is True


def test_evaluate_missing_assignment():
    with pytest.raises(MissingAssignment):
        evaluate(BoolVar("x"), {})


def test_evaluate_string_and_numeric():
    formula = And((StrEq("s", "a"), Cmp("n", ComparisonOp.LE, Fraction(3, 2))))
    assert evaluate(formula, {"s": "a", "n": Fraction(1)}) is True
    assert evaluate(formula, {"s": "b", "n": Fraction(1)}) is False


def test_evaluate_rejects_uninlined():
    odd = parse_odd("m:\n  INCLUDE_AND:\n    x: true\nn:\n  INCLUDE_AND:\n    - m\n")
    formula = lower_module(odd.modules["n"], odd)
    with pytest.raises(ValueError):
        evaluate(formula, {"x": True})


# ---------------------------------------------------------------------------
# brute_force_satisfiable
# ---------------------------------------------------------------------------


def test_brute_force_running_example(parking_odd, parking_cod):
    assert brute_force_satisfiable(parking_odd, parking_cod,
                                   ["parking_lot_conditions"]) is False
    assert brute_force_satisfiable(parking_odd, None,
                                   ["parking_lot_conditions"]) is True


def test_brute_force_bool_contradiction():
    odd = parse_odd("m:\n  INCLUDE_AND:\n    x: true\n")
    cod = parse_cod("x: false\n", odd.symbols)
    assert brute_force_satisfiable(odd, cod, ["m"]) is False


def test_brute_force_real_boundaries():
    odd = parse_odd("m:\n  INCLUDE_AND:\n    t: > 1.5\nn:\n  INCLUDE_AND:\n"
                    "    t: < 2.0\nboth:\n  INCLUDE_AND:\n    - m\n    - n\n")
    assert brute_force_satisfiable(odd, None, ["both"]) is True


def test_brute_force_integer_gap():
    odd = parse_odd("m:\n  INCLUDE_AND:\n    x: > 5\nn:\n  INCLUDE_AND:\n"
                    "    x: < 6\nboth:\n  INCLUDE_AND:\n    - m\n    - n\n")
    assert brute_force_satisfiable(odd, None, ["both"]) is False


def test_brute_force_domain_cap():
    odd = parse_odd("m:\n  INCLUDE_AND:\n    a: > 1\n    b: > 1\n    c: > 1\n")
    with pytest.raises(DomainTooLarge):
        brute_force_satisfiable(odd, None, ["m"], cap=8)


def test_finite_domains_shape(parking_odd):
    formulas = [inline(lower_module(
        parking_odd.modules["parking_lot_conditions"], parking_odd),
        parking_odd)]
    domains = finite_domains(parking_odd, formulas)
    assert domains["parking_lot_length"] == [11, 12, 13]
    assert domains["is_curve"] == [True, False]
    assert set(domains["surface"]) == {"puddle", "snow_covered", "__other__"}


# ---------------------------------------------------------------------------
# run_batch
# ---------------------------------------------------------------------------


def test_batch_ten_violations(parking_odd, parking_cod, solver_config):
    report = run_batch(parking_odd, [parking_cod] * 10,
                       ["parking_lot_conditions"], solver_config)
    assert [row.verdict for row in report.rows] == ["violation"] * 10
    assert [row.index for row in report.rows] == list(range(10))
    assert report.totals.count == 10
    assert report.totals.total_ms >= report.totals.max_ms


def test_batch_empty(parking_odd, solver_config):
    report = run_batch(parking_odd, [], ["parking_lot_conditions"],
                       solver_config)
    assert report.rows == ()
    assert report.totals.count == 0
    assert report.totals.total_ms == 0.0


def test_batch_records_error_rows(parking_odd, parking_cod, solver_config):
    items = [parking_cod, ValueError("3:1: unknown attribute"), parking_cod]
    report = run_batch(parking_odd, items, ["parking_lot_conditions"],
                       solver_config)
    verdicts = [row.verdict for row in report.rows]
    assert verdicts[0] == "violation" and verdicts[2] == "violation"
    assert verdicts[1].startswith("error:")


def test_batch_parallel_matches_sequential(parking_odd, parking_cod,
                                           solver_config):
    cods = [parking_cod] * 6
    sequential = run_batch(parking_odd, cods, ["parking_lot_conditions"],
                           solver_config, workers=1)
    parallel = run_batch(parking_odd, cods, ["parking_lot_conditions"],
                         solver_config, workers=3)
    assert [r.verdict for r in sequential.rows] == \
        [r.verdict for r in parallel.rows]
    assert [r.index for r in parallel.rows] == list(range(6))


def test_batch_csv_shape(parking_odd, parking_cod, solver_config):
    report = run_batch(parking_odd, [parking_cod] * 3,
                       ["parking_lot_conditions"], solver_config)
    lines = report.to_csv().splitlines()
    assert lines[0] == "index,verdict,wall_ms"
    assert len(lines) == 4
    assert lines[1].startswith("0,violation,")


# ---------------------------------------------------------------------------
# stream splitting and solver resolution
# ---------------------------------------------------------------------------


def test_split_cod_stream():
    stream = "a: 1\n---\nb: 2\nc: 3\n---\nd: 4\n"
    assert split_cod_stream(stream) == ["a: 1", "b: 2\nc: 3", "d: 4"]


def test_split_cod_stream_edges():
    assert split_cod_stream("") == []
    assert split_cod_stream("---\n") == []
    assert split_cod_stream("a: 1\n---\n") == ["a: 1"]


def test_env_override_resolution(monkeypatch):
    monkeypatch.setenv("VERIODD_SOLVER", "/custom/solver")
    config = default_solver_config()
    assert config.executable == "/custom/solver"
    assert config.extra_args == ()


def test_default_resolution_without_env(monkeypatch):
    monkeypatch.delenv("VERIODD_SOLVER", raising=False)
    config = default_solver_config()
    assert config.executable  # z3 or the bundled interpreter


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(timeout_ms=0)


def test_permuted_module_order_still_solves(parking_odd_text, solver_config):
    # Definition-before-use must hold regardless of source order.
    blocks = parking_odd_text.strip().split("\n\n")
    permuted = "\n\n".join([blocks[2], blocks[0], blocks[1]]) + "\n"
    odd = parse_odd(permuted)
    script = assemble_script(odd, None, ["parking_lot_conditions"])
    assert run_solver(script, solver_config).verdict == Verdict.SAT
