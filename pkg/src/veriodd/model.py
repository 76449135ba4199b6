"""Core data model for ODD and COD specifications.

An ODD (Operational Design Domain) is an ordered collection of named
modules.  Each module combines operator groups (INCLUDE_AND, INCLUDE_OR,
EXCLUDE_AND, EXCLUDE_OR) whose members constrain attributes or reference
other modules.  A COD (Current Operational Domain) is a flat set of exact
attribute observations.

Both specifications share a lowered ``Formula`` representation used by the
SMT-LIB and propositional-logic emitters as well as the brute-force
evaluator.  All types here are immutable after construction and every
operation is a pure function, so the model is safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Numeric literal value.  ``int`` marks an integer literal, ``Fraction``
#: marks a literal written with a decimal point (even when integral).
Number = Union[int, Fraction]


def is_identifier(text: str) -> bool:
    return bool(IDENTIFIER_RE.match(text))


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class VeriOddError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(VeriOddError):
    """Semantic error detected while building or analysing a specification."""


class SortConflict(ModelError):
    """One attribute used with two incompatible value kinds."""

    def __init__(self, attribute: str, first_kind: str, first_pos: "Pos",
                 second_kind: str, second_pos: "Pos") -> None:
        self.attribute = attribute
        self.first_kind = first_kind
        self.first_pos = first_pos
        self.second_kind = second_kind
        self.second_pos = second_pos
        super().__init__(
            f"attribute '{attribute}' used as {second_kind} at "
            f"{second_pos.line}:{second_pos.col} but as {first_kind} at "
            f"{first_pos.line}:{first_pos.col}"
        )


class UnitConflict(ModelError):
    """One attribute annotated with two distinct unit tokens."""

    def __init__(self, attribute: str, first_unit: str, first_pos: "Pos",
                 second_unit: str, second_pos: "Pos") -> None:
        self.attribute = attribute
        self.first_unit = first_unit
        self.first_pos = first_pos
        self.second_unit = second_unit
        self.second_pos = second_pos
        super().__init__(
            f"attribute '{attribute}' has unit '{second_unit}' at "
            f"{second_pos.line}:{second_pos.col} but unit '{first_unit}' at "
            f"{first_pos.line}:{first_pos.col}"
        )


class UnresolvedReference(ModelError):
    """A module reference that names no module."""

    def __init__(self, name: str, pos: "Pos") -> None:
        self.name = name
        self.pos = pos
        super().__init__(f"reference to unknown module '{name}'")


class ReferenceCycle(ModelError):
    """The module reference graph contains a cycle."""

    def __init__(self, names: list[str]) -> None:
        self.names = list(names)
        loop = " -> ".join(self.names + self.names[:1])
        super().__init__(f"module references form a cycle: {loop}")


# ---------------------------------------------------------------------------
# Source positions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Pos:
    """1-based source position."""

    line: int
    col: int


_NO_POS = Pos(0, 0)


# ---------------------------------------------------------------------------
# Sorts and operators
# ---------------------------------------------------------------------------


class Sort(Enum):
    """Logical type of an attribute, inferred from usage."""

    INT = "Int"
    REAL = "Real"
    BOOL = "Bool"
    STR = "String"

    @property
    def smt(self) -> str:
        """Spelling used in SMT-LIB declarations."""
        return self.value

    @property
    def is_numeric(self) -> bool:
        return self in (Sort.INT, Sort.REAL)


class ComparisonOp(Enum):
    """Comparison operator of a numeric constraint."""

    GT = ">"
    LT = "<"
    GE = ">="
    LE = "<="
    EQ = "="
    NE = "!="

    @property
    def symbol(self) -> str:
        return self.value

    @classmethod
    def from_symbol(cls, symbol: str) -> "ComparisonOp":
        for op in cls:
            if op.value == symbol:
                return op
        raise ValueError(f"unknown comparison operator {symbol!r}")


class GroupKind(Enum):
    """Operator key of a module group and the connective it denotes."""

    INCLUDE_AND = "INCLUDE_AND"
    INCLUDE_OR = "INCLUDE_OR"
    EXCLUDE_AND = "EXCLUDE_AND"
    EXCLUDE_OR = "EXCLUDE_OR"

    @property
    def key(self) -> str:
        return self.value

    @property
    def is_exclude(self) -> bool:
        return self in (GroupKind.EXCLUDE_AND, GroupKind.EXCLUDE_OR)

    @property
    def is_disjunctive(self) -> bool:
        return self in (GroupKind.INCLUDE_OR, GroupKind.EXCLUDE_OR)


OPERATOR_KEYS = {kind.key: kind for kind in GroupKind}


# ---------------------------------------------------------------------------
# Constraint values
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class NumericCmp:
    """Comparison against a numeric literal, e.g. ``> 12 m``."""

    op: ComparisonOp
    value: Number
    unit: str | None = None


@dataclass(frozen=True, slots=True)
class BoolLit:
    """Boolean constraint, e.g. ``is_curve: true``."""

    value: bool


@dataclass(frozen=True, slots=True)
class ScalarEq:
    """Equality with a bare scalar: a string or a number."""

    value: Union[str, Number]


@dataclass(frozen=True, slots=True)
class OneOf:
    """Membership in a list of scalars, e.g. ``surface: [puddle, snow]``."""

    values: tuple[Union[str, Number], ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("OneOf requires at least one value")


ConstraintValue = Union[NumericCmp, BoolLit, ScalarEq, OneOf]


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AttributeConstraint:
    """A group member constraining one attribute."""

    attribute: str
    value: ConstraintValue
    pos: Pos = field(default=_NO_POS, compare=False)


@dataclass(frozen=True, slots=True)
class ModuleRef:
    """A group member referencing another module by name."""

    name: str
    pos: Pos = field(default=_NO_POS, compare=False)


Member = Union[AttributeConstraint, ModuleRef]


@dataclass(frozen=True, slots=True)
class OperatorGroup:
    """One operator key with its ordered members.

    A group holds either attribute constraints or module references,
    never both: the YAML payload is either a mapping or a sequence.
    """

    kind: GroupKind
    members: tuple[Member, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("operator group requires at least one member")
        kinds = {type(m) for m in self.members}
        if len(kinds) > 1:
            raise ValueError("operator group mixes attribute constraints "
                             "and module references")


@dataclass(frozen=True, slots=True)
class ModuleDef:
    """A named module: ordered operator groups, at most one per kind."""

    name: str
    groups: tuple[OperatorGroup, ...]
    pos: Pos = field(default=_NO_POS, compare=False)

    def __post_init__(self) -> None:
        if not self.groups:
            raise ValueError("module requires at least one operator group")
        kinds = [g.kind for g in self.groups]
        if len(kinds) != len(set(kinds)):
            raise ValueError("module repeats an operator kind")

    def references(self) -> list[str]:
        """Names of directly referenced modules, in source order, deduplicated."""
        seen: dict[str, None] = {}
        for group in self.groups:
            for member in group.members:
                if isinstance(member, ModuleRef):
                    seen.setdefault(member.name, None)
        return list(seen)


@dataclass(frozen=True, slots=True)
class AttributeDecl:
    """Declaration inferred for one attribute: name, sort, optional unit."""

    name: str
    sort: Sort
    unit: str | None = None
    first_use: Pos = field(default=_NO_POS, compare=False)


@dataclass(slots=True)
class OddSpec:
    """A parsed ODD: ordered modules plus the inferred symbol table.

    Treated as immutable after construction; dict order is source order.
    """

    modules: dict[str, ModuleDef]
    symbols: dict[str, AttributeDecl]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OddSpec):
            return NotImplemented
        return self.modules == other.modules and self.symbols == other.symbols


@dataclass(frozen=True, slots=True)
class Observation:
    """One COD fact: attribute equals an exact value."""

    name: str
    value: Union[bool, Number, str]
    unit: str | None = None
    pos: Pos = field(default=_NO_POS, compare=False)


@dataclass(slots=True)
class CodSpec:
    """A parsed COD: ordered exact observations, at most one per attribute."""

    observations: dict[str, Observation]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodSpec):
            return NotImplemented
        return self.observations == other.observations


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("And requires children")


@dataclass(frozen=True, slots=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("Or requires children")


@dataclass(frozen=True, slots=True)
class Not:
    child: "Formula"


@dataclass(frozen=True, slots=True)
class Cmp:
    """Numeric comparison of an attribute against a literal."""

    attribute: str
    op: ComparisonOp
    value: Number


@dataclass(frozen=True, slots=True)
class StrEq:
    """String equality of an attribute against a literal."""

    attribute: str
    value: str


@dataclass(frozen=True, slots=True)
class BoolVar:
    """A boolean attribute used as a propositional variable."""

    attribute: str


@dataclass(frozen=True, slots=True)
class ModRef:
    """Reference to another module's formula."""

    name: str


@dataclass(frozen=True, slots=True)
class TrueVal:
    """The constant true formula."""


TRUE = TrueVal()

Formula = Union[And, Or, Not, Cmp, StrEq, BoolVar, ModRef, TrueVal]


# ---------------------------------------------------------------------------
# Sort inference
# ---------------------------------------------------------------------------


def _value_kind(value: ConstraintValue) -> tuple[Sort, str | None]:
    """Sort implied by one constraint value, plus its unit token."""
    if isinstance(value, NumericCmp):
        sort = Sort.REAL if isinstance(value.value, Fraction) else Sort.INT
        return sort, value.unit
    if isinstance(value, BoolLit):
        return Sort.BOOL, None
    if isinstance(value, ScalarEq):
        if isinstance(value.value, str):
            return Sort.STR, None
        sort = Sort.REAL if isinstance(value.value, Fraction) else Sort.INT
        return sort, None
    if isinstance(value, OneOf):
        sorts = set()
        for item in value.values:
            if isinstance(item, str):
                sorts.add(Sort.STR)
            elif isinstance(item, Fraction):
                sorts.add(Sort.REAL)
            else:
                sorts.add(Sort.INT)
        if sorts == {Sort.STR}:
            return Sort.STR, None
        if sorts <= {Sort.INT, Sort.REAL}:
            return (Sort.REAL if Sort.REAL in sorts else Sort.INT), None
        raise ValueError("OneOf values mix strings and numbers")
    raise TypeError(f"unexpected constraint value {value!r}")


def _merge_sorts(old: Sort, new: Sort) -> Sort | None:
    """Combined sort of two uses, or None when they are incompatible."""
    if old == new:
        return old
    if old.is_numeric and new.is_numeric:
        return Sort.REAL
    return None


def infer_sorts(modules: Iterable[ModuleDef]) -> dict[str, AttributeDecl]:
    """Build the attribute symbol table from every constraint in the ODD.

    Entries are ordered by first textual appearance.  Raises SortConflict
    when an attribute is used with incompatible value kinds and UnitConflict
    when two uses carry distinct unit tokens.
    """
    # name -> [sort, unit, unit_pos, first_pos, first_kind_label]
    table: dict[str, list] = {}
    for module in modules:
        for group in module.groups:
            for member in group.members:
                if not isinstance(member, AttributeConstraint):
                    continue
                sort, unit = _value_kind(member.value)
                entry = table.get(member.attribute)
                if entry is None:
                    table[member.attribute] = [sort, unit, member.pos,
                                               member.pos, sort.value]
                    continue
                merged = _merge_sorts(entry[0], sort)
                if merged is None:
                    raise SortConflict(member.attribute, entry[4], entry[3],
                                       sort.value, member.pos)
                entry[0] = merged
                if unit is not None:
                    if entry[1] is None:
                        entry[1] = unit
                        entry[2] = member.pos
                    elif entry[1] != unit:
                        raise UnitConflict(member.attribute, entry[1],
                                           entry[2], unit, member.pos)
    return {
        name: AttributeDecl(name, entry[0], entry[1], entry[3])
        for name, entry in table.items()
    }


# ---------------------------------------------------------------------------
# Reference resolution and ordering
# ---------------------------------------------------------------------------


def _module_deps(module: ModuleDef) -> Iterator[ModuleRef]:
    for group in module.groups:
        for member in group.members:
            if isinstance(member, ModuleRef):
                yield member


def topo_order(modules: Mapping[str, ModuleDef]) -> list[str]:
    """Stable topological order of the module reference DAG.

    Modules appear after everything they reference; among unconstrained
    modules, source order is preserved.  Raises UnresolvedReference or
    ReferenceCycle.
    """
    for module in modules.values():
        for ref in _module_deps(module):
            if ref.name not in modules:
                raise UnresolvedReference(ref.name, ref.pos)

    deps = {name: [r.name for r in _module_deps(module)]
            for name, module in modules.items()}
    emitted: set[str] = set()
    order: list[str] = []
    names = list(modules)
    while len(order) < len(names):
        # Always emit the first-in-source module whose deps are emitted,
        # so unconstrained modules keep their source order.
        pick = next((name for name in names if name not in emitted
                     and all(dep in emitted for dep in deps[name])), None)
        if pick is None:
            raise ReferenceCycle(_find_cycle(modules, emitted))
        emitted.add(pick)
        order.append(pick)
    return order


def _find_cycle(modules: Mapping[str, ModuleDef],
                emitted: set[str]) -> list[str]:
    remaining = [n for n in modules if n not in emitted]
    # Walk unemitted references from the first stuck module until a repeat.
    path: list[str] = []
    seen_at: dict[str, int] = {}
    current = remaining[0]
    while current not in seen_at:
        seen_at[current] = len(path)
        path.append(current)
        current = next(r.name for r in _module_deps(modules[current])
                       if r.name not in emitted)
    return path[seen_at[current]:]


def resolve_and_order(odd: OddSpec) -> list[str]:
    """Topological emission order for the ODD's modules."""
    return topo_order(odd.modules)


# ---------------------------------------------------------------------------
# Lowering to formulas
# ---------------------------------------------------------------------------


def _and(parts: list[Formula]) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def _or(parts: list[Formula]) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _widen(value: Number, sort: Sort) -> Number:
    if sort == Sort.REAL and isinstance(value, int):
        return Fraction(value)
    return value


def _lower_member(member: Member, odd: OddSpec) -> Formula:
    if isinstance(member, ModuleRef):
        return ModRef(member.name)
    attr = member.attribute
    sort = odd.symbols[attr].sort
    value = member.value
    if isinstance(value, NumericCmp):
        return Cmp(attr, value.op, _widen(value.value, sort))
    if isinstance(value, BoolLit):
        return BoolVar(attr) if value.value else Not(BoolVar(attr))
    if isinstance(value, ScalarEq):
        if isinstance(value.value, str):
            return StrEq(attr, value.value)
        return Cmp(attr, ComparisonOp.EQ, _widen(value.value, sort))
    if isinstance(value, OneOf):
        parts: list[Formula] = []
        for item in value.values:
            if isinstance(item, str):
                parts.append(StrEq(attr, item))
            else:
                parts.append(Cmp(attr, ComparisonOp.EQ, _widen(item, sort)))
        return _or(parts)
    raise TypeError(f"unexpected constraint value {value!r}")


def _lower_group(group: OperatorGroup, odd: OddSpec) -> Formula:
    parts = [_lower_member(m, odd) for m in group.members]
    combined = _or(parts) if group.kind.is_disjunctive else _and(parts)
    return Not(combined) if group.kind.is_exclude else combined


def lower_module(module: ModuleDef, odd: OddSpec) -> Formula:
    """Lower one module to its formula.

    Groups combine with conjunction in source order; numeric literals are
    widened to match the attribute's inferred sort.
    """
    return _and([_lower_group(g, odd) for g in module.groups])


def inline(formula: Formula, odd: OddSpec) -> Formula:
    """Replace every module reference by its recursively inlined body."""
    cache: dict[str, Formula] = {}

    def body(name: str) -> Formula:
        if name not in cache:
            cache[name] = walk(lower_module(odd.modules[name], odd))
        return cache[name]

    def walk(f: Formula) -> Formula:
        if isinstance(f, And):
            return And(tuple(walk(c) for c in f.children))
        if isinstance(f, Or):
            return Or(tuple(walk(c) for c in f.children))
        if isinstance(f, Not):
            return Not(walk(f.child))
        if isinstance(f, ModRef):
            return body(f.name)
        return f

    return walk(formula)


# ---------------------------------------------------------------------------
# Literal rendering
# ---------------------------------------------------------------------------


def decimal_str(value: Fraction) -> str:
    """Exact decimal spelling of a rational whose denominator is 2^a * 5^b.

    Falls back to ``p/q`` for non-terminating rationals (possible only for
    values coming back from a solver, never for parsed literals).
    """
    num, den = value.numerator, value.denominator
    sign = "-" if num < 0 else ""
    num = abs(num)
    scale = 0
    d = den
    while d % 2 == 0:
        d //= 2
        scale += 1
    fives = 0
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(scale, fives)
    scaled = num * 10 ** digits // den
    whole, frac = divmod(scaled, 10 ** digits)
    frac_text = str(frac).rjust(digits, "0").rstrip("0") or "0"
    return f"{sign}{whole}.{frac_text}"


def render_number(value: Number) -> str:
    """Literal spelling: integers bare, rationals in decimal form."""
    if isinstance(value, Fraction):
        return decimal_str(value)
    return str(value)
