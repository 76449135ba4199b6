#!/usr/bin/env python3
"""Regenerate the golden corpus under tests/golden/.

Each ODD case freezes the SMT-LIB and propositional outputs; each COD case
carries its context ODD and freezes both COD translations.  Inputs are a
mix of handcrafted documents (edge-case coverage) and seeded generator
output (breadth).  Run from the repository root after an intentional
output-format change, then review the diff:

    python3 scripts/gen_golden_corpus.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from veriodd import parse_cod, parse_odd  # noqa: E402
from veriodd.parsers import format_cod  # noqa: E402
from veriodd.proplogic import emit_cod_prop, emit_odd_prop  # noqa: E402
from veriodd.smtlib import emit_cod_smtlib, emit_odd_smtlib  # noqa: E402
from veriodd.synth import random_odd_text, sample_cod  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"

PARKING_ODD = (ROOT / "tests" / "data" / "parking_odd.yaml").read_text()
PARKING_COD = (ROOT / "tests" / "data" / "parking_cod.yaml").read_text()

HANDCRAFTED_ODDS: dict[str, str] = {
    "single_bool": (
        "m:\n"
        "  INCLUDE_AND:\n"
        "    x: true\n"
    ),
    "bool_false_member": (
        "cabin:\n"
        "  INCLUDE_AND:\n"
        "    doors_open: false\n"
        "    engine_on: true\n"
    ),
    "exclude_and_pair": (
        "never_both:\n"
        "  EXCLUDE_AND:\n"
        "    raining: true\n"
        "    wipers_off: true\n"
    ),
    "exclude_or_strings": (
        "no_bad_surface:\n"
        "  EXCLUDE_OR:\n"
        "    surface:\n"
        "      - ice\n"
        "      - oil_slick\n"
    ),
    "include_or_numbers": (
        "lane_pick:\n"
        "  INCLUDE_OR:\n"
        "    lane:\n"
        "      - 1\n"
        "      - 2\n"
        "      - 3\n"
    ),
    "all_comparators": (
        "ranges:\n"
        "  INCLUDE_AND:\n"
        "    a: > 1\n"
        "    b: < 2\n"
        "    c: >= 3\n"
        "    d: <= 4\n"
        "    e: = 5\n"
        "    f: != 6\n"
    ),
    "units": (
        "measured:\n"
        "  INCLUDE_AND:\n"
        "    length: > 12 m\n"
        "    width: >= 2 m\n"
        "other_use:\n"
        "  INCLUDE_AND:\n"
        "    length: < 100\n"
    ),
    "real_widening": (
        "coarse:\n"
        "  INCLUDE_AND:\n"
        "    temp: > 5\n"
        "fine:\n"
        "  INCLUDE_AND:\n"
        "    temp: < 7.5\n"
    ),
    "negative_literals": (
        "cold:\n"
        "  INCLUDE_AND:\n"
        "    celsius: < -10\n"
        "    floor: >= -2.5\n"
    ),
    "quoted_strings": (
        "labels:\n"
        "  INCLUDE_AND:\n"
        '    kind: "wet leaves"\n'
        '    note: "say \\"hi\\""\n'
        "    tags:\n"
        '      - "a b"\n'
        "      - plain\n"
    ),
    "one_of_flow": (
        "surfaces:\n"
        "  INCLUDE_AND:\n"
        "    surface: [gravel, asphalt, concrete]\n"
        "    lanes: [1, 2]\n"
    ),
    "ref_chain": (
        "base:\n"
        "  INCLUDE_AND:\n"
        "    x: > 0\n"
        "middle:\n"
        "  INCLUDE_AND:\n"
        "    - base\n"
        "top:\n"
        "  INCLUDE_AND:\n"
        "    - middle\n"
    ),
    "ref_diamond": (
        "ground:\n"
        "  INCLUDE_AND:\n"
        "    ok: true\n"
        "left:\n"
        "  INCLUDE_AND:\n"
        "    - ground\n"
        "right:\n"
        "  EXCLUDE_AND:\n"
        "    - ground\n"
        "roof:\n"
        "  INCLUDE_OR:\n"
        "    - left\n"
        "    - right\n"
    ),
    "four_groups": (
        "everything:\n"
        "  INCLUDE_AND:\n"
        "    a: true\n"
        "  INCLUDE_OR:\n"
        "    b: > 1\n"
        "    c: < 2\n"
        "  EXCLUDE_AND:\n"
        "    d: bad\n"
        "    e: worse\n"
        "  EXCLUDE_OR:\n"
        "    f: false\n"
    ),
    "exclude_refs": (
        "risky_a:\n"
        "  INCLUDE_AND:\n"
        "    hail: true\n"
        "risky_b:\n"
        "  INCLUDE_AND:\n"
        "    fog: true\n"
        "safe:\n"
        "  EXCLUDE_OR:\n"
        "    - risky_a\n"
        "    - risky_b\n"
    ),
    "parking": PARKING_ODD,
    "long_one_of": (
        "weather:\n"
        "  INCLUDE_AND:\n"
        "    sky:\n"
        "      - clear\n"
        "      - overcast\n"
        "      - drizzle\n"
        "      - rain\n"
        "      - sleet\n"
        "      - snow\n"
    ),
    "single_or_collapse": (
        "one:\n"
        "  INCLUDE_OR:\n"
        "    only: = 7\n"
    ),
    "comments_and_indent": (
        "# header comment\n"
        "m:   # module\n"
        "   INCLUDE_AND:\n"
        "      x: > 3   # constraint\n"
        "\n"
        "      y: true\n"
    ),
    "real_only": (
        "precise:\n"
        "  INCLUDE_AND:\n"
        "    ratio: >= 0.25\n"
        "    ratio2: != 1.5\n"
    ),
    "mixed_numbers_one_of": (
        "steps:\n"
        "  INCLUDE_AND:\n"
        "    level:\n"
        "      - 1\n"
        "      - 2.5\n"
        "      - 4\n"
    ),
    "two_towers": (
        "winter:\n"
        "  INCLUDE_AND:\n"
        "    temp: < 0\n"
        "    surface: snow_covered\n"
        "summer:\n"
        "  INCLUDE_AND:\n"
        "    temp: > 20\n"
        "    surface: dry\n"
        "either_season:\n"
        "  INCLUDE_OR:\n"
        "    - winter\n"
        "    - summer\n"
        "not_extreme:\n"
        "  EXCLUDE_OR:\n"
        "    temp:\n"
        "      - -40\n"
        "      - 60\n"
        "operational:\n"
        "  INCLUDE_AND:\n"
        "    - either_season\n"
        "    - not_extreme\n"
    ),
}

# (case name, odd case it validates against, cod text)
HANDCRAFTED_CODS: list[tuple[str, str, str]] = [
    ("parking_full", "parking", PARKING_COD),
    ("parking_partial", "parking",
     "parking_lot_length: = 13\nis_curve: true\n"),
    ("parking_conforming", "parking",
     "parking_lot_length: = 42\nis_curve: true\nsurface: dry\n"
     "location: bay\n"),
    ("parking_bare_number", "parking",
     "parking_lot_length: 13\n"),
    ("parking_with_unit", "parking",
     "parking_lot_length: = 13 m\n"),
    ("parking_empty", "parking", ""),
    ("bool_false", "bool_false_member",
     "doors_open: false\nengine_on: false\n"),
    ("real_int_widening", "real_widening", "temp: 6\n"),
    ("real_decimal", "real_widening", "temp: = 6.25\n"),
    ("negative_value", "negative_literals",
     "celsius: = -12\nfloor: -2.5\n"),
    ("quoted_value", "quoted_strings",
     'kind: "wet leaves"\nnote: "say \\"hi\\""\ntags: plain\n'),
    ("flow_context", "one_of_flow", "surface: gravel\nlanes: 2\n"),
    ("all_comparator_values", "all_comparators",
     "a: 2\nb: 1\nc: 3\nd: 4\ne: 5\nf: 7\n"),
    ("chain_base", "ref_chain", "x: 1\n"),
    ("towers_winter", "two_towers",
     "temp: = -5\nsurface: snow_covered\n"),
    ("towers_out_of_range", "two_towers",
     "temp: = 60\nsurface: dry\n"),
]

GENERATED_ODD_SEEDS = [3, 5, 7, 11, 12, 17, 19, 23, 29, 31,
                       37, 41, 47, 53, 59, 61, 67, 71]
GENERATED_COD_SEEDS = [(3, 1), (5, 2), (7, 3), (11, 4), (17, 5), (19, 6),
                       (23, 7), (29, 8), (31, 9), (37, 10), (41, 11),
                       (47, 12), (53, 13), (59, 14), (61, 15), (67, 16),
                       (71, 17), (12, 18), (29, 19)]


def write_case(directory: Path, files: dict[str, str]) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (directory / name).write_text(text, encoding="utf-8")


def main() -> int:
    odd_dir = GOLDEN / "odd"
    cod_dir = GOLDEN / "cod"

    odd_texts: dict[str, str] = dict(HANDCRAFTED_ODDS)
    for seed in GENERATED_ODD_SEEDS:
        odd_texts[f"gen_{seed:03d}"] = random_odd_text(seed)

    for index, (name, text) in enumerate(odd_texts.items()):
        odd = parse_odd(text)
        write_case(odd_dir / f"{index:03d}_{name}", {
            "input.yaml": text,
            "expected.smt2": emit_odd_smtlib(odd),
            "expected.pl.txt": emit_odd_prop(odd),
        })

    cod_cases: list[tuple[str, str, str]] = []
    for name, odd_name, cod_text in HANDCRAFTED_CODS:
        cod_cases.append((name, odd_texts[odd_name], cod_text))
    for odd_seed, cod_seed in GENERATED_COD_SEEDS:
        odd_text = odd_texts[f"gen_{odd_seed:03d}"]
        odd = parse_odd(odd_text)
        cod = sample_cod(odd, cod_seed, coverage=0.7)
        cod_cases.append((f"gen_{odd_seed:03d}_{cod_seed:02d}", odd_text,
                          format_cod(cod)))

    for index, (name, odd_text, cod_text) in enumerate(cod_cases):
        odd = parse_odd(odd_text)
        cod = parse_cod(cod_text, odd.symbols)
        write_case(cod_dir / f"{index:03d}_{name}", {
            "odd.yaml": odd_text,
            "input.yaml": cod_text,
            "expected.smt2": emit_cod_smtlib(cod),
            "expected.pl.txt": emit_cod_prop(cod),
        })

    n_odd = len(odd_texts)
    n_cod = len(cod_cases)
    print(f"wrote {n_odd} ODD cases and {n_cod} COD cases "
          f"({2 * (n_odd + n_cod)} golden comparisons)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
