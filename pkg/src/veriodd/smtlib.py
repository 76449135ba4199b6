"""SMT-LIB v2 emission: declarations, module definitions, COD assertions,
and assembled verification scripts.

Scripts are plain text with LF line endings.  Definition bodies are emitted
on a single line, so output only ever differs from a pretty-wrapped
rendering in whitespace; ``normalize_smt`` collapses such differences for
golden comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    And,
    BoolVar,
    Cmp,
    CodSpec,
    ComparisonOp,
    Formula,
    ModRef,
    Not,
    Number,
    OddSpec,
    Or,
    StrEq,
    TrueVal,
    VeriOddError,
    lower_module,
    render_number,
    topo_order,
)


class UnknownModule(VeriOddError):
    """A selected module name that the ODD does not define."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown module '{name}'")


@dataclass(frozen=True)
class SmtScript:
    """An assembled verification script, kept in its four sections.

    ``text`` concatenates declarations, definitions, assertions, and
    directives in that order; directives end with one ``(check-sat)``,
    optionally followed by ``(get-model)``.
    """

    declarations: tuple[str, ...] = ()
    definitions: tuple[str, ...] = ()
    assertions: tuple[str, ...] = ()
    directives: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        sections = [self.declarations, self.definitions, self.assertions,
                    self.directives]
        blocks = ["\n".join(lines) for lines in sections if lines]
        return "\n\n".join(blocks) + "\n" if blocks else ""

    @property
    def wants_model(self) -> bool:
        return "(get-model)" in self.directives


# ---------------------------------------------------------------------------
# Term rendering
# ---------------------------------------------------------------------------


def smt_string(value: str) -> str:
    """SMT-LIB string literal; double quotes escape by doubling."""
    return '"' + value.replace('"', '""') + '"'


def smt_number(value: Number) -> str:
    """SMT-LIB numeral; negatives use the ``(- n)`` form."""
    if value < 0:
        return f"(- {render_number(-value)})"
    return render_number(value)


def formula_sexpr(formula: Formula) -> str:
    """Single-line s-expression of a lowered formula."""
    if isinstance(formula, And):
        return "(and " + " ".join(formula_sexpr(c) for c in formula.children) + ")"
    if isinstance(formula, Or):
        return "(or " + " ".join(formula_sexpr(c) for c in formula.children) + ")"
    if isinstance(formula, Not):
        return f"(not {formula_sexpr(formula.child)})"
    if isinstance(formula, Cmp):
        eq = f"(= {formula.attribute} {smt_number(formula.value)})"
        if formula.op == ComparisonOp.EQ:
            return eq
        if formula.op == ComparisonOp.NE:
            return f"(not {eq})"
        return f"({formula.op.symbol} {formula.attribute} {smt_number(formula.value)})"
    if isinstance(formula, StrEq):
        return f"(= {formula.attribute} {smt_string(formula.value)})"
    if isinstance(formula, BoolVar):
        return formula.attribute
    if isinstance(formula, ModRef):
        return formula.name
    if isinstance(formula, TrueVal):
        return "true"
    raise TypeError(f"unexpected formula node {formula!r}")


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------


def declaration_lines(odd: OddSpec) -> list[str]:
    return [f"(declare-const {decl.name} {decl.sort.smt})"
            for decl in odd.symbols.values()]


def definition_lines(odd: OddSpec) -> list[str]:
    lines: list[str] = []
    for name in topo_order(odd.modules):
        body = formula_sexpr(lower_module(odd.modules[name], odd))
        lines.append(f"(define-fun {name} () Bool")
        lines.append(f"  {body})")
    return lines


def emit_odd_smtlib(odd: OddSpec) -> str:
    """Declarations in first-use order, then one define-fun per module in
    definition-before-use order."""
    decls = declaration_lines(odd)
    defs = definition_lines(odd)
    blocks = [b for b in ("\n".join(decls), "\n".join(defs)) if b]
    return "\n\n".join(blocks) + "\n" if blocks else ""


def cod_assertion_lines(cod: CodSpec) -> list[str]:
    lines = []
    for obs in cod.observations.values():
        if isinstance(obs.value, bool):
            rendered = "true" if obs.value else "false"
        elif isinstance(obs.value, str):
            rendered = smt_string(obs.value)
        else:
            rendered = smt_number(obs.value)
        lines.append(f"(assert (= {obs.name} {rendered}))")
    return lines


def emit_cod_smtlib(cod: CodSpec) -> str:
    """One assertion per observation, in source order."""
    lines = cod_assertion_lines(cod)
    return "\n".join(lines) + "\n" if lines else ""


def assemble_script(odd: OddSpec, cod: CodSpec | None,
                    modules: list[str] | tuple[str, ...],
                    want_model: bool = False) -> SmtScript:
    """Merge ODD definitions, optional COD assertions, and the selected
    module assertions into one script ending in ``(check-sat)``.

    The full ODD is emitted, not just the selected closure; unreferenced
    definitions do not affect satisfiability.
    """
    if not modules:
        raise ValueError("at least one module must be selected")
    for name in modules:
        if name not in odd.modules:
            raise UnknownModule(name)
    assertions = list(cod_assertion_lines(cod)) if cod is not None else []
    assertions.extend(f"(assert {name})" for name in modules)
    directives = ["(check-sat)"]
    if want_model:
        directives.append("(get-model)")
    return SmtScript(
        declarations=tuple(declaration_lines(odd)),
        definitions=tuple(definition_lines(odd)),
        assertions=tuple(assertions),
        directives=tuple(directives),
    )


# ---------------------------------------------------------------------------
# Whitespace normalization for golden comparison
# ---------------------------------------------------------------------------


def parse_sexprs(text: str):
    """Parse text into a list of top-level s-expressions.

    Atoms are strings (string literals keep their quotes); ``;`` comments
    are skipped.  Raises ValueError on unbalanced input.
    """
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(ch)
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            if j >= n:
                raise ValueError("unterminated string literal")
            tokens.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            tokens.append(text[i:j])
            i = j

    forms: list = []
    stack: list[list] = []
    for token in tokens:
        if token == "(":
            stack.append([])
        elif token == ")":
            if not stack:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else forms).append(done)
        else:
            (stack[-1] if stack else forms).append(token)
    if stack:
        raise ValueError("unbalanced '('")
    return forms


def _render_sexpr(form) -> str:
    if isinstance(form, str):
        return form
    return "(" + " ".join(_render_sexpr(f) for f in form) + ")"


def normalize_smt(text: str) -> str:
    """Canonical form for golden comparison: whitespace runs inside each
    top-level form collapse to single spaces, one form per line."""
    forms = parse_sexprs(text)
    if not forms:
        return ""
    return "\n".join(_render_sexpr(f) for f in forms) + "\n"
