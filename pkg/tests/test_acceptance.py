"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (collected into acceptance_report.txt at session end).

The scaling criterion launches several thousand solver processes and
dominates the suite's runtime; everything else completes in seconds.
"""

import random
import time
from pathlib import Path

from proptools import differential_cases
from test_proplogic import EXPECTED_COD as PROP_COD_REFERENCE
from test_proplogic import WRAPPED_ODD as PROP_ODD_WRAPPED
from test_smtlib import EXPECTED_COD as SMT_COD_REFERENCE
from test_smtlib import EXPECTED_SELECTION as SMT_SELECTION_REFERENCE
from test_smtlib import WRAPPED_ODD as SMT_ODD_WRAPPED

from veriodd import parse_cod, parse_odd
from veriodd.engine import (
    CheckVerdict,
    check_consistency,
    evaluate,
    run_batch,
    verify_cod,
)
from veriodd.model import And, inline, lower_module
from veriodd.parsers import ParseFailure
from veriodd.proplogic import emit_cod_prop, emit_odd_prop, normalize_prop
from veriodd.smtlib import (
    assemble_script,
    emit_cod_smtlib,
    emit_odd_smtlib,
    normalize_smt,
)
from veriodd.synth import random_odd_text, sample_cod, scaling_odd_text

GOLDEN = Path(__file__).parent / "golden"


def test_running_example_goldens(acceptance, parking_odd_text,
                                 parking_cod_text):
    started = time.perf_counter()
    odd = parse_odd(parking_odd_text)
    cod = parse_cod(parking_cod_text, odd.symbols)

    ok_odd_smt = (normalize_smt(emit_odd_smtlib(odd))
                  == normalize_smt(SMT_ODD_WRAPPED))
    ok_cod_smt = (normalize_smt(emit_cod_smtlib(cod))
                  == normalize_smt(SMT_COD_REFERENCE))
    ok_odd_prop = (normalize_prop(emit_odd_prop(odd))
                   == normalize_prop(PROP_ODD_WRAPPED))
    ok_cod_prop = emit_cod_prop(cod) == PROP_COD_REFERENCE
    script = assemble_script(odd, cod, ["parking_lot_conditions"])
    merged_reference = (SMT_ODD_WRAPPED + "\n" + SMT_COD_REFERENCE + "\n"
                        + SMT_SELECTION_REFERENCE)
    ok_script = normalize_smt(script.text) == normalize_smt(merged_reference)
    elapsed = time.perf_counter() - started
    ok_time = elapsed < 1.0

    acceptance.check(
        "running-example-goldens",
        ok_odd_smt and ok_cod_smt and ok_odd_prop and ok_cod_prop
        and ok_script and ok_time,
        f"odd_smt={ok_odd_smt} cod_smt={ok_cod_smt} odd_prop={ok_odd_prop} "
        f"cod_prop={ok_cod_prop} script={ok_script} time={elapsed:.3f}s")


def test_running_example_verdicts(acceptance, parking_odd, parking_cod,
                                  solver_config):
    violation = verify_cod(parking_odd, parking_cod,
                           ["parking_lot_conditions"], solver_config)
    within = verify_cod(parking_odd, parking_cod,
                        ["supported_parking_lot_conditions"], solver_config)
    consistent = check_consistency(parking_odd, ["parking_lot_conditions"],
                                   solver_config)
    ok = (violation.verdict == CheckVerdict.VIOLATION
          and within.verdict == CheckVerdict.WITHIN_ODD
          and consistent.verdict == CheckVerdict.CONSISTENT)
    acceptance.check(
        "running-example-verdicts", ok,
        f"composite={violation.verdict.label} "
        f"supported={within.verdict.label} "
        f"consistency={consistent.verdict.label}")


def test_golden_corpus_coverage(acceptance):
    from veriodd.proplogic import emit_odd_prop as odd_prop

    comparisons = 0
    failures = 0
    for case in sorted((GOLDEN / "odd").iterdir()):
        odd = parse_odd((case / "input.yaml").read_text())
        for emitted, expected_name in (
                (emit_odd_smtlib(odd), "expected.smt2"),
                (odd_prop(odd), "expected.pl.txt")):
            comparisons += 1
            if emitted != (case / expected_name).read_text():
                failures += 1
    for case in sorted((GOLDEN / "cod").iterdir()):
        odd = parse_odd((case / "odd.yaml").read_text())
        cod = parse_cod((case / "input.yaml").read_text(), odd.symbols)
        for emitted, expected_name in (
                (emit_cod_smtlib(cod), "expected.smt2"),
                (emit_cod_prop(cod), "expected.pl.txt")):
            comparisons += 1
            if emitted != (case / expected_name).read_text():
                failures += 1
    acceptance.check(
        "golden-corpus", comparisons >= 145 and failures == 0,
        f"{comparisons} byte-exact comparisons across four translators, "
        f"{failures} failures")


def test_differential_oracle_suite(acceptance, solver_config):
    started = time.perf_counter()
    total = 0
    agreements = 0
    for _odd, _cod, _modules, solver_sat, oracle_sat in \
            differential_cases(200, solver_config):
        total += 1
        if solver_sat == oracle_sat:
            agreements += 1
    elapsed = time.perf_counter() - started
    acceptance.check(
        "differential-oracle", total >= 200 and agreements == total
        and elapsed < 300,
        f"{agreements}/{total} agree in {elapsed:.1f}s")


def test_robustness_fuzzing(acceptance, parking_odd):
    rng = random.Random(20240809)
    crashes = 0
    unpositioned = 0
    for i in range(10_000):
        size = rng.randint(0, 200)
        if i % 2:
            data = rng.randbytes(size)
        else:
            data = bytes(rng.randint(32, 126) for _ in range(size))
        for parser in ("odd", "cod"):
            try:
                if parser == "odd":
                    parse_odd(data)
                else:
                    parse_cod(data, parking_odd.symbols)
            except ParseFailure as failure:
                diag = failure.diagnostics[0]
                if not (failure.diagnostics and diag.line >= 1
                        and diag.col >= 1):
                    unpositioned += 1
            except Exception:
                crashes += 1
    acceptance.check(
        "robustness-fuzzing", crashes == 0 and unpositioned == 0,
        f"10000 byte strings x 2 parsers: {crashes} crashes, "
        f"{unpositioned} unpositioned rejections")


def test_model_soundness(acceptance, solver_config):
    sound = 0
    consistent_seen = 0
    seed = 0
    while consistent_seen < 50 and seed < 2000:
        seed += 1
        odd = parse_odd(random_odd_text(seed))
        if not odd.modules:
            continue
        modules = [next(iter(odd.modules))] if seed % 2 else list(odd.modules)
        result = check_consistency(odd, modules, solver_config,
                                   want_model=True)
        if result.verdict != CheckVerdict.CONSISTENT:
            continue
        consistent_seen += 1
        conjunction = And(tuple(
            inline(lower_module(odd.modules[name], odd), odd)
            for name in modules)) if len(modules) > 1 else \
            inline(lower_module(odd.modules[modules[0]], odd), odd)
        if evaluate(conjunction, result.outcome.model):
            sound += 1
    acceptance.check(
        "model-soundness", consistent_seen == 50 and sound == 50,
        f"{sound}/{consistent_seen} returned models evaluate to true")


def _fit_r_squared(xs, ys):
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_res = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    return 1.0 - ss_res / ss_tot


def test_scaling_experiment(acceptance, parking_odd, solver_config):
    counts = [10, 100, 500, 1000, 5000]
    results = {}
    for label, odd, modules in (
            ("6-variable", parking_odd, ["parking_lot_conditions"]),
            ("1000-variable", parse_odd(scaling_odd_text(1000, seed=1)),
             ["top_level"])):
        totals = []
        for count in counts:
            cods = (sample_cod(odd, seed) for seed in range(count))
            report = run_batch(odd, cods, modules, solver_config)
            assert report.totals.count == count
            totals.append(report.totals.total_ms)
        r_squared = _fit_r_squared(counts, totals)
        ratio = totals[4] / totals[2]
        results[label] = (r_squared, ratio, totals)

    ok = all(r2 >= 0.97 and 7.0 <= ratio <= 13.0
             for r2, ratio, _ in results.values())
    detail = "; ".join(
        f"{label}: R2={r2:.4f} ratio={ratio:.2f} "
        f"totals={[round(t) for t in totals]}"
        for label, (r2, ratio, totals) in results.items())
    acceptance.check("scaling-linear-runtime", ok, detail)
