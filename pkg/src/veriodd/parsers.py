"""Parsers for the YAML subset accepted in ODD and COD documents.

The accepted subset: block mappings, block sequences of scalars, inline
flow sequences ``[a, b]``, ``#`` comments, plain and double-quoted scalars,
and any consistent widening indentation of two or more spaces.  Anchors,
aliases, tags, flow mappings, multi-document streams, and tabs are
rejected with positioned diagnostics.  The parser is hand-written so that
every rejection carries an exact line and column and so that the grammar
does not inherit a full YAML implementation's quirks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Union

from .model import (
    AttributeConstraint,
    AttributeDecl,
    BoolLit,
    CodSpec,
    ComparisonOp,
    ModuleDef,
    ModuleRef,
    NumericCmp,
    Number,
    Observation,
    OddSpec,
    OneOf,
    OperatorGroup,
    OPERATOR_KEYS,
    Pos,
    ReferenceCycle,
    ScalarEq,
    Sort,
    SortConflict,
    UnitConflict,
    UnresolvedReference,
    VeriOddError,
    infer_sorts,
    is_identifier,
    render_number,
    topo_order,
)

CMP_SYMBOLS = (">=", "<=", "!=", ">", "<", "=")
NUMBER_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?\Z")
TOKEN_RE = re.compile(r"\S+")


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A positioned message about the input text."""

    severity: Severity
    message: str
    line: int
    col: int
    snippet: str

    def render(self, origin: str = "<memory>") -> str:
        head = f"{origin}:{self.line}:{self.col}: {self.severity.value}: {self.message}"
        if not self.snippet:
            return head
        pointer = " " * (self.col - 1) + "^"
        return f"{head}\n  {self.snippet}\n  {pointer}"


@dataclass(frozen=True)
class SourceDoc:
    """An input document: full text plus its origin for error reporting."""

    text: str
    origin: str = "<memory>"


class ParseFailure(VeriOddError):
    """Raised when a document is rejected; carries the diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic], stage: str = "parse") -> None:
        self.diagnostics = list(diagnostics)
        self.stage = stage  # "parse" or "sort"
        first = self.diagnostics[0]
        super().__init__(f"{first.line}:{first.col}: {first.message}")


class MalformedComparison(VeriOddError):
    """A scalar value that does not match the constraint grammar."""

    def __init__(self, message: str, offset: int = 0) -> None:
        self.offset = offset  # character offset into the scalar text
        super().__init__(message)


class _Abort(Exception):
    """Internal: unwinds to parse_odd/parse_cod with one diagnostic."""

    def __init__(self, diagnostic: Diagnostic, stage: str = "parse") -> None:
        self.diagnostic = diagnostic
        self.stage = stage


# ---------------------------------------------------------------------------
# Line scanning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Line:
    indent: int
    content: str  # comment-stripped, trailing whitespace removed
    lineno: int   # 1-based


class _Scanner:
    """Splits the input into significant lines and owns diagnostics."""

    def __init__(self, text: str) -> None:
        self.raw_lines = text.split("\n")
        if self.raw_lines and self.raw_lines[-1] == "":
            self.raw_lines.pop()
        self.raw_lines = [ln[:-1] if ln.endswith("\r") else ln
                          for ln in self.raw_lines]

    def snippet(self, lineno: int) -> str:
        if 1 <= lineno <= len(self.raw_lines):
            return self.raw_lines[lineno - 1]
        return ""

    def fail(self, message: str, line: int, col: int, stage: str = "parse") -> None:
        diag = Diagnostic(Severity.ERROR, message, max(line, 1), max(col, 1),
                          self.snippet(line))
        raise _Abort(diag, stage)

    def scan(self) -> list[_Line]:
        out: list[_Line] = []
        for idx, raw in enumerate(self.raw_lines, start=1):
            tab = raw.find("\t")
            if tab != -1:
                self.fail("tab characters are not allowed", idx, tab + 1)
            if "\r" in raw:
                self.fail("stray carriage return", idx, raw.find("\r") + 1)
            content = self._strip_comment(raw, idx)
            stripped = content.strip()
            if not stripped:
                continue
            if stripped == "---" or stripped.startswith("--- "):
                self.fail("multi-document streams are not supported", idx,
                          content.index("---") + 1)
            indent = len(content) - len(content.lstrip(" "))
            out.append(_Line(indent, content.rstrip(), idx))
        return out

    def _strip_comment(self, raw: str, lineno: int) -> str:
        in_quote = False
        i = 0
        while i < len(raw):
            ch = raw[i]
            if in_quote:
                if ch == "\\" and i + 1 < len(raw):
                    i += 2
                    continue
                if ch == '"':
                    in_quote = False
            elif ch == '"':
                in_quote = True
            elif ch == "#" and (i == 0 or raw[i - 1] in " "):
                return raw[:i]
            i += 1
        return raw


# ---------------------------------------------------------------------------
# Structural nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Scalar:
    text: str       # decoded value (escapes resolved when quoted)
    line: int
    col: int
    quoted: bool = False


@dataclass(frozen=True)
class _Seq:
    items: list
    line: int
    col: int


@dataclass(frozen=True)
class _Entry:
    key: str
    line: int
    col: int
    value: Union[_Scalar, _Seq, "_Map", None]


@dataclass(frozen=True)
class _Map:
    entries: list
    line: int
    col: int


_RESERVED_LEAD = {
    "&": "anchors are not supported",
    "*": "aliases are not supported",
    "!": "tags are not supported",
    "%": "directives are not supported",
    "{": "flow mappings are not supported",
    "'": "single-quoted scalars are not supported; use double quotes",
}


class _BlockParser:
    """Indentation-driven parser producing the generic node tree."""

    def __init__(self, scanner: _Scanner, lines: list[_Line]) -> None:
        self.scanner = scanner
        self.lines = lines
        self.i = 0

    def parse_document(self) -> Union[_Map, _Seq, None]:
        if not self.lines:
            return None
        node = self._parse_node(self.lines[0].indent)
        if self.i < len(self.lines):
            stray = self.lines[self.i]
            self.scanner.fail("unexpected indentation", stray.lineno,
                              stray.indent + 1)
        return node

    def _peek(self) -> _Line | None:
        return self.lines[self.i] if self.i < len(self.lines) else None

    def _parse_node(self, indent: int) -> Union[_Map, _Seq]:
        line = self.lines[self.i]
        body = line.content[indent:]
        if body == "-" or body.startswith("- "):
            return self._parse_sequence(indent)
        return self._parse_mapping(indent)

    def _parse_sequence(self, indent: int) -> _Seq:
        first = self.lines[self.i]
        items: list[_Scalar] = []
        while True:
            line = self._peek()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                self.scanner.fail("unexpected indentation", line.lineno,
                                  line.indent + 1)
            body = line.content[indent:]
            if not (body == "-" or body.startswith("- ")):
                self.scanner.fail(
                    "cannot mix sequence items and mapping keys in one block",
                    line.lineno, indent + 1)
            rest = body[2:].strip() if body != "-" else ""
            if not rest:
                self.scanner.fail("sequence item must be a scalar",
                                  line.lineno, indent + 1)
            col = indent + 1 + (len(body) - len(body[2:].lstrip())) if body != "-" else indent + 1
            items.append(self._parse_scalar(rest, line.lineno, col))
            self.i += 1
        return _Seq(items, first.lineno, indent + 1)

    def _parse_mapping(self, indent: int) -> _Map:
        first = self.lines[self.i]
        entries: list[_Entry] = []
        while True:
            line = self._peek()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                self.scanner.fail("unexpected indentation", line.lineno,
                                  line.indent + 1)
            body = line.content[indent:]
            if body == "-" or body.startswith("- "):
                self.scanner.fail(
                    "cannot mix sequence items and mapping keys in one block",
                    line.lineno, indent + 1)
            entries.append(self._parse_entry(line, indent, body))
        return _Map(entries, first.lineno, indent + 1)

    def _parse_entry(self, line: _Line, indent: int, body: str) -> _Entry:
        colon = body.find(":")
        if colon == -1:
            self.scanner.fail("expected a 'key:' mapping entry", line.lineno,
                              indent + 1)
        key = body[:colon]
        if not is_identifier(key):
            self.scanner.fail(f"key {key!r} is not an identifier",
                              line.lineno, indent + 1)
        rest = body[colon + 1:]
        if rest and not rest.startswith(" "):
            self.scanner.fail("expected a space after ':'", line.lineno,
                              indent + colon + 2)
        rest_stripped = rest.strip()
        self.i += 1
        if rest_stripped:
            col = indent + colon + 2 + (len(rest) - len(rest.lstrip()))
            if rest_stripped.startswith("["):
                value: Union[_Scalar, _Seq, _Map, None] = self._parse_flow_seq(
                    rest_stripped, line.lineno, col)
            else:
                value = self._parse_scalar(rest_stripped, line.lineno, col)
            return _Entry(key, line.lineno, indent + 1, value)
        nxt = self._peek()
        if nxt is None or nxt.indent <= indent:
            return _Entry(key, line.lineno, indent + 1, None)
        if nxt.indent < indent + 2:
            self.scanner.fail("indentation must increase by at least two spaces",
                              nxt.lineno, nxt.indent + 1)
        return _Entry(key, line.lineno, indent + 1, self._parse_node(nxt.indent))

    def _parse_scalar(self, text: str, lineno: int, col: int) -> _Scalar:
        if text.startswith('"'):
            value, consumed = self._parse_quoted(text, lineno, col)
            trailing = text[consumed:]
            if trailing.strip():
                self.scanner.fail("unexpected text after quoted scalar",
                                  lineno, col + consumed)
            return _Scalar(value, lineno, col, quoted=True)
        lead = text[0]
        if lead in _RESERVED_LEAD and not text.startswith("!="):
            self.scanner.fail(_RESERVED_LEAD[lead], lineno, col)
        if lead in "[]":
            self.scanner.fail("flow sequences are only allowed as values",
                              lineno, col)
        return _Scalar(text, lineno, col, quoted=False)

    def _parse_quoted(self, text: str, lineno: int, col: int) -> tuple[str, int]:
        out: list[str] = []
        i = 1
        while i < len(text):
            ch = text[i]
            if ch == "\\":
                if i + 1 >= len(text) or text[i + 1] not in ('"', "\\"):
                    self.scanner.fail(
                        'only \\" and \\\\ escapes are supported in quoted scalars',
                        lineno, col + i)
                out.append(text[i + 1])
                i += 2
                continue
            if ch == '"':
                return "".join(out), i + 1
            out.append(ch)
            i += 1
        self.scanner.fail("unterminated quoted scalar", lineno, col)
        raise AssertionError("unreachable")

    def _parse_flow_seq(self, text: str, lineno: int, col: int) -> _Seq:
        items: list[_Scalar] = []
        i = 1
        while True:
            while i < len(text) and text[i] == " ":
                i += 1
            if i >= len(text):
                self.scanner.fail("unterminated flow sequence", lineno, col)
            if text[i] == "]":
                break
            if text[i] == ",":
                self.scanner.fail("empty element in flow sequence",
                                  lineno, col + i)
            if text[i] == "[":
                self.scanner.fail("nested flow sequences are not supported",
                                  lineno, col + i)
            start = i
            if text[i] == '"':
                value, consumed = self._parse_quoted(text[i:], lineno, col + i)
                items.append(_Scalar(value, lineno, col + i, quoted=True))
                i += consumed
            else:
                while i < len(text) and text[i] not in ",]":
                    i += 1
                raw = text[start:i].strip()
                if not raw:
                    self.scanner.fail("empty element in flow sequence",
                                      lineno, col + start)
                if raw[0] in _RESERVED_LEAD:
                    self.scanner.fail(_RESERVED_LEAD[raw[0]], lineno,
                                      col + start)
                items.append(_Scalar(raw, lineno, col + start, quoted=False))
            while i < len(text) and text[i] == " ":
                i += 1
            if i >= len(text):
                self.scanner.fail("unterminated flow sequence", lineno, col)
            if text[i] == ",":
                i += 1
            elif text[i] != "]":
                self.scanner.fail("expected ',' or ']' in flow sequence",
                                  lineno, col + i)
        trailing = text[i + 1:]
        if trailing.strip():
            self.scanner.fail("unexpected text after flow sequence",
                              lineno, col + i + 1)
        return _Seq(items, lineno, col)


# ---------------------------------------------------------------------------
# Scalar value grammar
# ---------------------------------------------------------------------------


def _parse_number_token(token: str) -> Number | None:
    if not NUMBER_RE.match(token):
        return None
    if "." in token:
        return Fraction(token)
    return int(token)


def parse_constraint_value(text: str) -> Union[NumericCmp, BoolLit, ScalarEq]:
    """Parse one plain scalar from a value position.

    Grammar: ``cmp_op number unit?`` | ``true`` | ``false`` | ``number`` |
    ``bare_string`` with tokens separated by spaces.  Quoted scalars are
    handled by the document parser, not here.  Raises MalformedComparison.
    """
    tokens = [(m.group(0), m.start()) for m in TOKEN_RE.finditer(text)]
    if not tokens:
        raise MalformedComparison("empty value")
    head, head_off = tokens[0]
    if head in ("true", "false"):
        if len(tokens) > 1:
            raise MalformedComparison("unexpected text after boolean literal",
                                      tokens[1][1])
        return BoolLit(head == "true")
    if head in CMP_SYMBOLS:
        if len(tokens) < 2:
            raise MalformedComparison(f"expected a number after '{head}'",
                                      head_off + len(head))
        number = _parse_number_token(tokens[1][0])
        if number is None:
            raise MalformedComparison(f"expected a number after '{head}'",
                                      tokens[1][1])
        unit = None
        if len(tokens) >= 3:
            unit = tokens[2][0]
            if not is_identifier(unit):
                raise MalformedComparison("unit must be an identifier",
                                          tokens[2][1])
            if len(tokens) > 3:
                raise MalformedComparison("unexpected text after unit",
                                          tokens[3][1])
        return NumericCmp(ComparisonOp.from_symbol(head), number, unit)
    if len(tokens) == 1:
        number = _parse_number_token(head)
        if number is not None:
            return ScalarEq(number)
        if is_identifier(head):
            return ScalarEq(head)
        if head[0] in "<>=!":
            raise MalformedComparison(
                f"malformed comparison {head!r}; operator and number must be "
                "separated by a space", head_off)
        raise MalformedComparison(
            f"unquoted scalar {head!r} is not an identifier", head_off)
    if _parse_number_token(head) is not None:
        raise MalformedComparison("unexpected text after number literal",
                                  tokens[1][1])
    raise MalformedComparison(
        "unquoted strings with spaces must be double-quoted", tokens[1][1])


# ---------------------------------------------------------------------------
# ODD document reader
# ---------------------------------------------------------------------------


def _as_doc(doc: Union[SourceDoc, str, bytes]) -> SourceDoc:
    if isinstance(doc, SourceDoc):
        return doc
    if isinstance(doc, bytes):
        try:
            return SourceDoc(doc.decode("utf-8"))
        except UnicodeDecodeError as exc:
            prefix = doc[:exc.start]
            line = prefix.count(b"\n") + 1
            col = exc.start - (prefix.rfind(b"\n") + 1) + 1
            diag = Diagnostic(Severity.ERROR, "input is not valid UTF-8",
                              line, col, "")
            raise ParseFailure([diag]) from None
    return SourceDoc(doc)


class _OddReader:
    def __init__(self, scanner: _Scanner) -> None:
        self.scanner = scanner

    def read(self, root: Union[_Map, _Seq, None]) -> dict[str, ModuleDef]:
        if root is None:
            return {}
        if isinstance(root, _Seq):
            self.scanner.fail("an ODD document must be a mapping of modules",
                              root.line, root.col)
        modules: dict[str, ModuleDef] = {}
        for entry in root.entries:
            if entry.key in OPERATOR_KEYS:
                self.scanner.fail(
                    f"expected a module name, found operator key '{entry.key}'",
                    entry.line, entry.col)
            if entry.key in modules:
                self.scanner.fail(f"duplicate module '{entry.key}'",
                                  entry.line, entry.col)
            modules[entry.key] = self._read_module(entry)
        return modules

    def _read_module(self, entry: _Entry) -> ModuleDef:
        if entry.value is None:
            self.scanner.fail(f"module '{entry.key}' has no body",
                              entry.line, entry.col)
        if not isinstance(entry.value, _Map):
            self.scanner.fail(
                f"module '{entry.key}' body must be a mapping of operator keys",
                entry.value.line, entry.value.col)
        groups: list[OperatorGroup] = []
        seen_kinds: set[str] = set()
        for op_entry in entry.value.entries:
            kind = OPERATOR_KEYS.get(op_entry.key)
            if kind is None:
                self.scanner.fail(f"unknown operator key {op_entry.key}",
                                  op_entry.line, op_entry.col)
            if op_entry.key in seen_kinds:
                self.scanner.fail(
                    f"operator {op_entry.key} appears twice in module "
                    f"'{entry.key}'", op_entry.line, op_entry.col)
            seen_kinds.add(op_entry.key)
            groups.append(self._read_group(kind, op_entry))
        return ModuleDef(entry.key, tuple(groups), Pos(entry.line, entry.col))

    def _read_group(self, kind, op_entry: _Entry) -> OperatorGroup:
        payload = op_entry.value
        if payload is None:
            self.scanner.fail(f"operator {op_entry.key} has an empty payload",
                              op_entry.line, op_entry.col)
        if isinstance(payload, _Scalar):
            self.scanner.fail(
                "operator payload must be a mapping of attribute constraints "
                "or a sequence of module references",
                payload.line, payload.col)
        if isinstance(payload, _Seq):
            return OperatorGroup(kind, self._read_refs(payload, op_entry))
        return OperatorGroup(kind, self._read_constraints(payload))

    def _read_refs(self, payload: _Seq, op_entry: _Entry) -> tuple:
        if not payload.items:
            self.scanner.fail(f"operator {op_entry.key} has an empty payload",
                              op_entry.line, op_entry.col)
        refs = []
        seen: set[str] = set()
        for item in payload.items:
            if item.quoted or not is_identifier(item.text):
                self.scanner.fail(
                    "sequence members must name modules (plain identifiers)",
                    item.line, item.col)
            if item.text in seen:
                self.scanner.fail(f"duplicate module reference '{item.text}'",
                                  item.line, item.col)
            seen.add(item.text)
            refs.append(ModuleRef(item.text, Pos(item.line, item.col)))
        return tuple(refs)

    def _read_constraints(self, payload: _Map) -> tuple:
        members = []
        seen: set[str] = set()
        for entry in payload.entries:
            if entry.key in seen:
                self.scanner.fail(
                    f"duplicate attribute key '{entry.key}' in operator group",
                    entry.line, entry.col)
            seen.add(entry.key)
            members.append(AttributeConstraint(
                entry.key, self._read_constraint_value(entry),
                Pos(entry.line, entry.col)))
        return tuple(members)

    def _read_constraint_value(self, entry: _Entry):
        value = entry.value
        if value is None:
            self.scanner.fail(f"attribute '{entry.key}' has no value",
                              entry.line, entry.col)
        if isinstance(value, _Map):
            self.scanner.fail("attribute value must be a scalar or a list "
                              "of scalars", value.line, value.col)
        if isinstance(value, _Seq):
            return self._read_one_of(value, entry)
        if value.quoted:
            return ScalarEq(value.text)
        try:
            return parse_constraint_value(value.text)
        except MalformedComparison as exc:
            self.scanner.fail(str(exc), value.line, value.col + exc.offset)

    def _read_one_of(self, seq: _Seq, entry: _Entry) -> OneOf:
        if not seq.items:
            self.scanner.fail(f"attribute '{entry.key}' has an empty value list",
                              seq.line, seq.col)
        values: list = []
        saw_str = saw_num = False
        for item in seq.items:
            if item.quoted:
                value: Union[str, Number] = item.text
                saw_str = True
            elif item.text in ("true", "false"):
                self.scanner.fail("boolean values are not allowed in value "
                                  "lists", item.line, item.col)
            else:
                number = _parse_number_token(item.text)
                if number is not None:
                    value = number
                    saw_num = True
                elif is_identifier(item.text):
                    value = item.text
                    saw_str = True
                else:
                    self.scanner.fail(
                        "list values must be identifiers, quoted strings, or "
                        "numbers", item.line, item.col)
            if saw_str and saw_num:
                self.scanner.fail("list values must be all strings or all "
                                  "numbers", item.line, item.col)
            if value in values:
                self.scanner.fail(f"duplicate value in list for attribute "
                                  f"'{entry.key}'", item.line, item.col)
            values.append(value)
        return OneOf(tuple(values))


def parse_odd(doc: Union[SourceDoc, str, bytes]) -> OddSpec:
    """Parse an ODD document into a validated OddSpec.

    Raises ParseFailure carrying at least one positioned diagnostic when the
    text violates the grammar, uses unknown operator keys, or fails sort
    inference / reference resolution.  Never returns a partial spec.
    """
    source = _as_doc(doc)
    scanner = _Scanner(source.text)
    try:
        lines = scanner.scan()
        root = _BlockParser(scanner, lines).parse_document()
        modules = _OddReader(scanner).read(root)
        try:
            symbols = infer_sorts(modules.values())
        except (SortConflict, UnitConflict) as exc:
            pos = exc.second_pos
            scanner.fail(str(exc), pos.line, pos.col, stage="sort")
        for name, decl in symbols.items():
            if name in modules:
                scanner.fail(
                    f"name '{name}' denotes both a module and an attribute",
                    decl.first_use.line, decl.first_use.col)
        try:
            topo_order(modules)
        except UnresolvedReference as exc:
            scanner.fail(str(exc), exc.pos.line, exc.pos.col)
        except ReferenceCycle as exc:
            head = modules[exc.names[0]].pos
            scanner.fail(str(exc), head.line, head.col)
        return OddSpec(modules, symbols)
    except _Abort as abort:
        raise ParseFailure([abort.diagnostic], abort.stage) from None


# ---------------------------------------------------------------------------
# COD document reader
# ---------------------------------------------------------------------------


def parse_cod(doc: Union[SourceDoc, str, bytes],
              symbols: Mapping[str, AttributeDecl]) -> CodSpec:
    """Parse a COD document against an ODD symbol table.

    Observations keep source order; values are checked against declared
    sorts (integer literals widen to Real where the ODD declares Real).
    Partial CODs are accepted; an empty document yields zero observations.
    """
    source = _as_doc(doc)
    scanner = _Scanner(source.text)
    try:
        lines = scanner.scan()
        root = _BlockParser(scanner, lines).parse_document()
        if root is None:
            return CodSpec({})
        if isinstance(root, _Seq):
            scanner.fail("a COD document must be a mapping of observations",
                         root.line, root.col)
        observations: dict[str, Observation] = {}
        for entry in root.entries:
            if entry.key in observations:
                scanner.fail(f"attribute '{entry.key}' observed twice",
                             entry.line, entry.col)
            decl = symbols.get(entry.key)
            if decl is None:
                scanner.fail(f"unknown attribute '{entry.key}' (not declared "
                             "by the ODD)", entry.line, entry.col)
            observations[entry.key] = _read_observation(scanner, entry, decl)
        return CodSpec(observations)
    except _Abort as abort:
        raise ParseFailure([abort.diagnostic], abort.stage) from None


def _read_observation(scanner: _Scanner, entry: _Entry,
                      decl: AttributeDecl) -> Observation:
    value = entry.value
    if value is None:
        scanner.fail(f"observation '{entry.key}' has no value",
                     entry.line, entry.col)
    if not isinstance(value, _Scalar):
        scanner.fail("COD observations must be scalar values",
                     value.line, value.col)
    unit: str | None = None
    if value.quoted:
        observed: Union[bool, Number, str] = value.text
    else:
        try:
            parsed = parse_constraint_value(value.text)
        except MalformedComparison as exc:
            scanner.fail(str(exc), value.line, value.col + exc.offset)
        if isinstance(parsed, NumericCmp):
            if parsed.op != ComparisonOp.EQ:
                scanner.fail("COD values must be exact observations",
                             value.line, value.col)
            observed = parsed.value
            unit = parsed.unit
        elif isinstance(parsed, BoolLit):
            observed = parsed.value
        else:
            observed = parsed.value
    observed = _check_observation_sort(scanner, entry, decl, value, observed)
    if unit is not None and decl.unit is not None and unit != decl.unit:
        scanner.fail(f"observation unit '{unit}' differs from declared unit "
                     f"'{decl.unit}'", value.line, value.col, stage="sort")
    return Observation(entry.key, observed, unit, Pos(value.line, value.col))


def _check_observation_sort(scanner: _Scanner, entry: _Entry,
                            decl: AttributeDecl, scalar: _Scalar, observed):
    def mismatch(found: str) -> None:
        scanner.fail(f"attribute '{entry.key}' is declared {decl.sort.value} "
                     f"but observed as {found}", scalar.line, scalar.col,
                     stage="sort")

    if isinstance(observed, bool):
        if decl.sort != Sort.BOOL:
            mismatch("Bool")
        return observed
    if isinstance(observed, str):
        if decl.sort != Sort.STR:
            mismatch("String")
        return observed
    if isinstance(observed, Fraction):
        if decl.sort != Sort.REAL:
            mismatch("Real")
        return observed
    # plain int literal
    if decl.sort == Sort.REAL:
        return Fraction(observed)
    if decl.sort != Sort.INT:
        mismatch("Int")
    return observed


# ---------------------------------------------------------------------------
# Canonical printing (parse -> print -> parse is a fixpoint)
# ---------------------------------------------------------------------------


def _print_string_scalar(value: str) -> str:
    if is_identifier(value) and value not in ("true", "false"):
        return value
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _print_scalar(value: Union[str, Number]) -> str:
    if isinstance(value, str):
        return _print_string_scalar(value)
    return render_number(value)


def _print_constraint(value) -> str:
    if isinstance(value, NumericCmp):
        text = f"{value.op.symbol} {render_number(value.value)}"
        return f"{text} {value.unit}" if value.unit else text
    if isinstance(value, BoolLit):
        return "true" if value.value else "false"
    if isinstance(value, ScalarEq):
        return _print_scalar(value.value)
    raise TypeError(f"not a scalar constraint: {value!r}")


def format_odd(odd: OddSpec) -> str:
    """Render an OddSpec back to canonical document text."""
    blocks: list[str] = []
    for module in odd.modules.values():
        lines = [f"{module.name}:"]
        for group in module.groups:
            lines.append(f"  {group.kind.key}:")
            for member in group.members:
                if isinstance(member, ModuleRef):
                    lines.append(f"    - {member.name}")
                elif isinstance(member.value, OneOf):
                    lines.append(f"    {member.attribute}:")
                    for item in member.value.values:
                        lines.append(f"      - {_print_scalar(item)}")
                else:
                    lines.append(f"    {member.attribute}: "
                                 f"{_print_constraint(member.value)}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def format_cod(cod: CodSpec) -> str:
    """Render a CodSpec back to canonical document text."""
    lines = []
    for obs in cod.observations.values():
        if isinstance(obs.value, bool):
            rendered = "true" if obs.value else "false"
        elif isinstance(obs.value, str):
            rendered = _print_string_scalar(obs.value)
        else:
            rendered = f"= {render_number(obs.value)}"
            if obs.unit:
                rendered += f" {obs.unit}"
        lines.append(f"{obs.name}: {rendered}")
    return "\n".join(lines) + "\n" if lines else ""
