"""Human-readable propositional-logic views of ODD and COD documents.

The view mirrors structure for review: module references are inlined, each
inlined body keeps ``[`` ``]`` brackets, and every connective is fully
parenthesized, so operator precedence never matters.  This output is never
reparsed by the verification path.
"""

from __future__ import annotations

from .model import (
    And,
    BoolVar,
    Cmp,
    CodSpec,
    Formula,
    ModRef,
    Not,
    OddSpec,
    Or,
    StrEq,
    TrueVal,
    is_identifier,
    lower_module,
    render_number,
)


def _render(formula: Formula, odd: OddSpec, cache: dict[str, str]) -> str:
    if isinstance(formula, And):
        return "(" + " & ".join(_render(c, odd, cache) for c in formula.children) + ")"
    if isinstance(formula, Or):
        return "(" + " | ".join(_render(c, odd, cache) for c in formula.children) + ")"
    if isinstance(formula, Not):
        inner = _render(formula.child, odd, cache)
        if not inner.startswith("("):
            inner = f"({inner})"
        return f"(!{inner})"
    if isinstance(formula, Cmp):
        return f"({formula.attribute} {formula.op.symbol} {render_number(formula.value)})"
    if isinstance(formula, StrEq):
        return f"({formula.attribute} = {formula.value})"
    if isinstance(formula, BoolVar):
        return formula.attribute
    if isinstance(formula, ModRef):
        if formula.name not in cache:
            body = lower_module(odd.modules[formula.name], odd)
            cache[formula.name] = _render(body, odd, cache)
        return f"[{cache[formula.name]}]"
    if isinstance(formula, TrueVal):
        return "true"
    raise TypeError(f"unexpected formula node {formula!r}")


def render_formula(formula: Formula, odd: OddSpec) -> str:
    """Infix rendering with module references expanded into brackets."""
    return _render(formula, odd, {})


def emit_odd_prop(odd: OddSpec) -> str:
    """One block per module in source order: ``name:=`` then the fully
    inlined formula wrapped in brackets."""
    cache: dict[str, str] = {}
    blocks = []
    for name, module in odd.modules.items():
        body = _render(lower_module(module, odd), odd, cache)
        blocks.append(f"{name}:=\n[{body}]")
    return "\n\n".join(blocks) + "\n" if blocks else ""


def emit_cod_prop(cod: CodSpec) -> str:
    """One ``attribute = value`` line per observation; strings unquoted."""
    lines = []
    for obs in cod.observations.values():
        if isinstance(obs.value, bool):
            rendered = "true" if obs.value else "false"
        elif isinstance(obs.value, str):
            rendered = obs.value
        else:
            rendered = render_number(obs.value)
        lines.append(f"{obs.name} = {rendered}")
    return "\n".join(lines) + "\n" if lines else ""


def normalize_prop(text: str) -> str:
    """Canonical form for golden comparison of module blocks: whitespace
    collapses, each ``name:=`` starts a new line."""
    lines: list[list[str]] = []
    current: list[str] = []
    for token in text.split():
        if token.endswith(":=") and is_identifier(token[:-2]):
            if current:
                lines.append(current)
            current = [token]
        else:
            current.append(token)
    if current:
        lines.append(current)
    if not lines:
        return ""
    return "\n".join(" ".join(parts) for parts in lines) + "\n"
