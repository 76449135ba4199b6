"""Synthetic ODD/COD generators for benchmarking and differential testing.

Two families:

* scaling specs — ``v`` boolean/integer attributes grouped into ceil(v/10)
  INCLUDE_AND modules under one top-level module, plus CODs sampling each
  attribute uniformly from its finite abstraction; used for the batch
  runtime experiment.
* randomized small specs — varied operators, sorts, value lists, and module
  references within the finite-abstraction cap; used to cross-check the
  solver pipeline against the brute-force oracle.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Union

from .model import (
    AttributeConstraint,
    CodSpec,
    NumericCmp,
    Number,
    Observation,
    OddSpec,
    OneOf,
    ScalarEq,
    Sort,
    render_number,
)

CMP_OPS = (">", "<", ">=", "<=", "=", "!=")


# ---------------------------------------------------------------------------
# Scaling experiment specs
# ---------------------------------------------------------------------------


def scaling_odd_text(num_attrs: int, seed: int = 0) -> str:
    """ODD with ``num_attrs`` bool/int attributes in chunks of ten
    INCLUDE_AND modules below a single top-level module."""
    rng = random.Random(seed)
    lines: list[str] = []
    chunk_names: list[str] = []
    for chunk_start in range(0, num_attrs, 10):
        chunk = f"chunk_{chunk_start // 10}"
        chunk_names.append(chunk)
        lines.append(f"{chunk}:")
        lines.append("  INCLUDE_AND:")
        for i in range(chunk_start, min(chunk_start + 10, num_attrs)):
            if rng.random() < 0.5:
                value = rng.choice(("true", "false"))
            else:
                value = f"{rng.choice(('>', '<', '>=', '<='))} {rng.randint(0, 100)}"
            lines.append(f"    attr_{i}: {value}")
        lines.append("")
    lines.append("top_level:")
    lines.append("  INCLUDE_AND:")
    for chunk in chunk_names:
        lines.append(f"    - {chunk}")
    return "\n".join(lines) + "\n"


def _constraint_constants(odd: OddSpec) -> dict[str, list[Number]]:
    constants: dict[str, list[Number]] = {}
    for module in odd.modules.values():
        for group in module.groups:
            for member in group.members:
                if not isinstance(member, AttributeConstraint):
                    continue
                value = member.value
                bucket = constants.setdefault(member.attribute, [])
                if isinstance(value, NumericCmp):
                    if value.value not in bucket:
                        bucket.append(value.value)
                elif isinstance(value, ScalarEq) and not isinstance(value.value, str):
                    if value.value not in bucket:
                        bucket.append(value.value)
                elif isinstance(value, OneOf):
                    for item in value.values:
                        if not isinstance(item, str) and item not in bucket:
                            bucket.append(item)
    return constants


def _string_literals(odd: OddSpec) -> dict[str, list[str]]:
    literals: dict[str, list[str]] = {}
    for module in odd.modules.values():
        for group in module.groups:
            for member in group.members:
                if not isinstance(member, AttributeConstraint):
                    continue
                value = member.value
                bucket = literals.setdefault(member.attribute, [])
                items: tuple = ()
                if isinstance(value, ScalarEq) and isinstance(value.value, str):
                    items = (value.value,)
                elif isinstance(value, OneOf):
                    items = tuple(v for v in value.values if isinstance(v, str))
                for item in items:
                    if item not in bucket:
                        bucket.append(item)
    return literals


def sample_cod(odd: OddSpec, seed: int, coverage: float = 1.0) -> CodSpec:
    """COD sampling each attribute uniformly from its finite abstraction."""
    rng = random.Random(seed)
    constants = _constraint_constants(odd)
    literals = _string_literals(odd)
    observations: dict[str, Observation] = {}
    for name, decl in odd.symbols.items():
        if rng.random() > coverage:
            continue
        value: Union[bool, Number, str]
        if decl.sort == Sort.BOOL:
            value = rng.choice((True, False))
        elif decl.sort == Sort.STR:
            pool = literals.get(name, []) + ["something_else"]
            value = rng.choice(pool)
        else:
            offset: Number = 1 if decl.sort == Sort.INT else Fraction(1, 2)
            pool = []
            for constant in constants.get(name, [0]):
                pool.extend((constant - offset, constant, constant + offset))
            value = rng.choice(pool)
            if decl.sort == Sort.REAL and isinstance(value, int):
                value = Fraction(value)
        observations[name] = Observation(name, value)
    return CodSpec(observations)


# ---------------------------------------------------------------------------
# Randomized small specs for differential testing
# ---------------------------------------------------------------------------


def random_odd_text(seed: int, max_attrs: int = 6, max_modules: int = 4,
                    max_str_literals: int = 3) -> str:
    """A small random ODD exercising all operators and value shapes.

    Attribute sorts are fixed up front so the document always parses; module
    references only point at earlier modules, so the graph is acyclic.
    """
    rng = random.Random(seed)
    n_attrs = rng.randint(1, max_attrs)
    attrs = []
    for i in range(n_attrs):
        sort = rng.choice((Sort.BOOL, Sort.INT, Sort.REAL, Sort.STR))
        pool = [f"s{i}_{j}" for j in range(rng.randint(1, max_str_literals))]
        attrs.append((f"x{i}", sort, pool))

    def constraint_text(sort: Sort, pool: list[str]) -> str:
        if sort == Sort.BOOL:
            return rng.choice(("true", "false"))
        if sort == Sort.STR:
            if len(pool) > 1 and rng.random() < 0.5:
                chosen = rng.sample(pool, rng.randint(2, len(pool)))
                if rng.random() < 0.5:
                    return "[" + ", ".join(chosen) + "]"
                return "\n" + "\n".join(f"      - {v}" for v in chosen)
            return rng.choice(pool)
        constant: Number = rng.randint(-3, 3)
        if sort == Sort.REAL:
            constant = Fraction(rng.randint(-6, 6), 2)
        if rng.random() < 0.2:
            return render_number(constant)
        op = rng.choice(CMP_OPS)
        return f"{op} {render_number(constant)}"

    lines: list[str] = []
    module_names: list[str] = []
    n_modules = rng.randint(1, max_modules)
    for m in range(n_modules):
        name = f"m{m}"
        lines.append(f"{name}:")
        kinds = rng.sample(("INCLUDE_AND", "INCLUDE_OR", "EXCLUDE_AND",
                            "EXCLUDE_OR"), rng.randint(1, 2))
        for kind in kinds:
            use_refs = module_names and rng.random() < 0.35
            lines.append(f"  {kind}:")
            if use_refs:
                refs = rng.sample(module_names,
                                  rng.randint(1, min(2, len(module_names))))
                for ref in refs:
                    lines.append(f"    - {ref}")
            else:
                chosen = rng.sample(attrs, rng.randint(1, min(3, len(attrs))))
                for attr_name, sort, pool in chosen:
                    text = constraint_text(sort, pool)
                    if text.startswith("\n"):
                        lines.append(f"    {attr_name}:{text}")
                    else:
                        lines.append(f"    {attr_name}: {text}")
        module_names.append(name)
    return "\n".join(lines) + "\n"


def random_module_selection(odd: OddSpec, seed: int) -> list[str]:
    rng = random.Random(seed)
    names = list(odd.modules)
    return rng.sample(names, rng.randint(1, len(names)))
