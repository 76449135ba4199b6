"""Self-contained SMT-LIB v2 solver for the quantifier-free fragment the
code generators emit: and/or/not over comparisons of a variable against a
numeric constant, string equalities, and boolean variables, with zero-arg
Bool ``define-fun`` macros.

Intended as a drop-in fallback when no external solver (z3, cvc5, ...) is
installed: ``python3 -S -E minismt.py script.smt2`` prints ``sat`` or
``unsat`` and, after ``(get-model)``, a model in the usual
``(define-fun name () Sort value)`` shape.  It is deliberately standalone
(stdlib only, no package imports) so a fresh process starts in
milliseconds, and it shares no code with the translation pipeline it is
used to check.

Decision procedure: macro expansion into a shared DAG, unit extraction
over the assertion conjunction, per-variable interval/equality reasoning
(exact for constraints against constants), and a small backtracking search
over the remaining atoms.  Rationals are kept as integer pairs with a
power-of-ten denominator, so every model value prints as an exact decimal.
"""

import re
import sys

TOKEN_RE = re.compile(r'"(?:[^"]|"")*"|[()]|;[^\n]*|[^\s()";]+')
NUM_RE = re.compile(r"-?[0-9]+(?:\.[0-9]+)?\Z")


class SmtError(Exception):
    pass


# ---------------------------------------------------------------------------
# Rationals as (num, den) with den a power of ten
# ---------------------------------------------------------------------------


def rat_parse(token):
    if not NUM_RE.match(token):
        return None
    if "." in token:
        whole, frac = token.split(".")
        den = 10 ** len(frac)
        num = int(whole) * den + (-1 if token.startswith("-") else 1) * int(frac)
        return rat_norm(num, den), True
    return (int(token), 1), False


def rat_norm(num, den):
    while den > 1 and num % 10 == 0:
        num //= 10
        den //= 10
    return (num, den)


def rat_cmp(a, b):
    lhs = a[0] * b[1]
    rhs = b[0] * a[1]
    return (lhs > rhs) - (lhs < rhs)


def rat_add_int(a, k):
    return (a[0] + k * a[1], a[1])


def rat_mid(a, b):
    num = a[0] * b[1] + b[0] * a[1]
    den = 2 * a[1] * b[1]
    return rat_norm(num * 5, den * 5)


def rat_is_int(a):
    return a[0] % a[1] == 0


def rat_floor(a):
    return a[0] // a[1]


def rat_ceil(a):
    return -((-a[0]) // a[1])


def rat_str(a, as_real):
    num, den = a
    sign = "-" if num < 0 else ""
    num = abs(num)
    whole, frac = divmod(num, den)
    if den == 1:
        text = f"{whole}.0" if as_real else str(whole)
    else:
        digits = len(str(den)) - 1
        text = f"{whole}.{str(frac).rjust(digits, '0')}"
    return sign + text


# ---------------------------------------------------------------------------
# Tokenizing and reading
# ---------------------------------------------------------------------------


def read_forms(text):
    tokens = [t for t in TOKEN_RE.findall(text) if not t.startswith(";")]
    forms = []
    stack = []
    for token in tokens:
        if token == "(":
            stack.append([])
        elif token == ")":
            if not stack:
                raise SmtError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else forms).append(done)
        else:
            (stack[-1] if stack else forms).append(token)
    if stack:
        raise SmtError("unbalanced '('")
    return forms


def unquote(token):
    return token[1:-1].replace('""', '"')


# ---------------------------------------------------------------------------
# Solver state
# ---------------------------------------------------------------------------

ORDER_OPS = ("<", ">", "<=", ">=")


class Solver:
    def __init__(self):
        self.sorts = {}        # var -> "Int" | "Real" | "Bool" | "String"
        self.macros = {}       # name -> raw body form
        self.expanded = {}     # name -> expanded node
        self.expanding = set()
        self.asserts = []      # expanded nodes
        self.atoms = []        # atom id -> ("num", var, op, rat) | ("str", var, s) | ("bool", var)
        self.atom_ids = {}
        self.var_atoms = {}    # var -> [atom ids]
        self.assign = []       # atom id -> True | False | None
        self.trail = []
        self.last_model = None

    # -- construction -------------------------------------------------

    def atom(self, key):
        aid = self.atom_ids.get(key)
        if aid is None:
            aid = len(self.atoms)
            self.atom_ids[key] = aid
            self.atoms.append(key)
            self.assign.append(None)
            self.var_atoms.setdefault(key[1], []).append(aid)
        return aid

    def numeric_rhs(self, form, var):
        if isinstance(form, list):
            if len(form) == 2 and form[0] == "-":
                inner = self.numeric_rhs(form[1], var)
                return (-inner[0][0], inner[0][1]), inner[1]
            raise SmtError(f"unsupported numeric term in constraint on '{var}'")
        parsed = rat_parse(form)
        if parsed is None:
            raise SmtError(f"expected a numeric literal, found '{form}'")
        return parsed

    def build(self, form):
        """Expand a term into an atomized node: tuples for connectives,
        integer atom ids at the leaves, True/False for constants."""
        if isinstance(form, str):
            if form == "true":
                return True
            if form == "false":
                return False
            if form in self.macros:
                return self.expand_macro(form)
            sort = self.sorts.get(form)
            if sort is None:
                raise SmtError(f"unknown symbol '{form}'")
            if sort != "Bool":
                raise SmtError(f"'{form}' of sort {sort} used as a formula")
            return self.atom(("bool", form))
        if not form:
            raise SmtError("empty expression")
        head = form[0]
        if head == "and" or head == "or":
            if len(form) < 2:
                raise SmtError(f"'{head}' needs at least one argument")
            return (head, [self.build(f) for f in form[1:]])
        if head == "not":
            if len(form) != 2:
                raise SmtError("'not' takes exactly one argument")
            return ("not", self.build(form[1]))
        if head in ORDER_OPS or head == "=":
            return self.build_atom(head, form)
        raise SmtError(f"unsupported operator '{head}'")

    def build_atom(self, op, form):
        if len(form) != 3:
            raise SmtError(f"'{op}' takes exactly two arguments")
        lhs, rhs = form[1], form[2]
        if not isinstance(lhs, str):
            raise SmtError(f"'{op}' expects a declared constant on the left")
        if lhs not in self.sorts:
            raise SmtError(f"unknown symbol '{lhs}'")
        var = lhs
        sort = self.sorts[var]
        if op in ORDER_OPS:
            if sort not in ("Int", "Real"):
                raise SmtError(f"'{op}' applied to {sort} constant '{var}'")
            value, is_dec = self.numeric_rhs(rhs, var)
            if sort == "Int" and not rat_is_int(value):
                raise SmtError(f"decimal literal compared with Int constant '{var}'")
            return self.atom(("num", var, op, value))
        # equality
        if sort == "Bool":
            if rhs == "true":
                return self.atom(("bool", var))
            if rhs == "false":
                return ("not", self.atom(("bool", var)))
            raise SmtError(f"Bool constant '{var}' compared with non-boolean")
        if sort == "String":
            if isinstance(rhs, str) and rhs.startswith('"'):
                return self.atom(("str", var, unquote(rhs)))
            raise SmtError(f"String constant '{var}' compared with non-string")
        value, is_dec = self.numeric_rhs(rhs, var)
        if sort == "Int" and not rat_is_int(value):
            raise SmtError(f"decimal literal compared with Int constant '{var}'")
        return self.atom(("num", var, "=", value))

    def expand_macro(self, name):
        if name in self.expanded:
            return self.expanded[name]
        if name in self.expanding:
            raise SmtError(f"recursive definition of '{name}'")
        self.expanding.add(name)
        node = self.build(self.macros[name])
        self.expanding.discard(name)
        self.expanded[name] = node
        return node

    # -- assignment and theory state -----------------------------------

    def set_atom(self, aid, value):
        current = self.assign[aid]
        if current is not None:
            return current == value
        self.assign[aid] = value
        self.trail.append(aid)
        return True

    def undo_to(self, mark):
        while len(self.trail) > mark:
            self.assign[self.trail.pop()] = None

    def var_state(self, var):
        """Summarize assigned atoms of a numeric or string variable."""
        sort = self.sorts[var]
        if sort == "String":
            pos, neg = None, set()
            for aid in self.var_atoms[var]:
                val = self.assign[aid]
                if val is None:
                    continue
                literal = self.atoms[aid][2]
                if val:
                    if pos is not None and pos != literal:
                        return None
                    pos = literal
                else:
                    neg.add(literal)
            if pos is not None and pos in neg:
                return None
            return (pos, neg)
        lo = hi = None  # (value, strict)
        neq = set()
        for aid in self.var_atoms[var]:
            val = self.assign[aid]
            if val is None:
                continue
            _, _, op, c = self.atoms[aid]
            if op == "=":
                if val:
                    lo = self._tighten_lo(lo, c, False)
                    hi = self._tighten_hi(hi, c, False)
                else:
                    neq.add(c)
                continue
            if not val:
                op = {"<": ">=", ">": "<=", "<=": ">", ">=": "<"}[op]
            if op == ">":
                lo = self._tighten_lo(lo, c, True)
            elif op == ">=":
                lo = self._tighten_lo(lo, c, False)
            elif op == "<":
                hi = self._tighten_hi(hi, c, True)
            else:
                hi = self._tighten_hi(hi, c, False)
        if sort == "Int":
            lo, hi = self._integer_bounds(lo, hi)
        if not self._interval_feasible(sort, lo, hi, neq):
            return None
        return (lo, hi, neq)

    @staticmethod
    def _tighten_lo(lo, c, strict):
        if lo is None:
            return (c, strict)
        d = rat_cmp(c, lo[0])
        if d > 0 or (d == 0 and strict and not lo[1]):
            return (c, strict)
        return lo

    @staticmethod
    def _tighten_hi(hi, c, strict):
        if hi is None:
            return (c, strict)
        d = rat_cmp(c, hi[0])
        if d < 0 or (d == 0 and strict and not hi[1]):
            return (c, strict)
        return hi

    @staticmethod
    def _integer_bounds(lo, hi):
        if lo is not None:
            v, strict = lo
            bound = rat_floor(v) + 1 if strict else rat_ceil(v)
            lo = ((bound, 1), False)
        if hi is not None:
            v, strict = hi
            bound = rat_ceil(v) - 1 if strict else rat_floor(v)
            hi = ((bound, 1), False)
        return lo, hi

    @staticmethod
    def _interval_feasible(sort, lo, hi, neq):
        if lo is None or hi is None:
            return True
        d = rat_cmp(lo[0], hi[0])
        if d > 0:
            return False
        if d == 0:
            if lo[1] or hi[1]:
                return False
            return lo[0] not in neq
        if sort == "Int":
            low, high = rat_floor(lo[0]), rat_floor(hi[0])
            excluded = sum(1 for e in neq
                           if rat_is_int(e) and low <= rat_floor(e) <= high)
            return high - low + 1 > excluded
        return True

    def entailed(self, state, key):
        """Decide an unassigned atom from a variable's summary, if forced."""
        kind = key[0]
        if kind == "str":
            pos, neg = state
            literal = key[2]
            if pos is not None:
                return pos == literal
            if literal in neg:
                return False
            return None
        lo, hi, neq = state
        op, c = key[2], key[3]
        if op == "=":
            if lo is not None and hi is not None and not lo[1] and not hi[1] \
                    and rat_cmp(lo[0], hi[0]) == 0:
                return rat_cmp(lo[0], c) == 0
            if lo is not None and rat_cmp(c, lo[0]) < 0:
                return False
            if lo is not None and lo[1] and rat_cmp(c, lo[0]) == 0:
                return False
            if hi is not None and rat_cmp(c, hi[0]) > 0:
                return False
            if hi is not None and hi[1] and rat_cmp(c, hi[0]) == 0:
                return False
            return None
        # Order atom: the feasible interval either lies inside the solution
        # set, misses it entirely, or straddles the constant.
        if op == ">":
            if lo is not None and (rat_cmp(lo[0], c) > 0
                                   or (rat_cmp(lo[0], c) == 0 and lo[1])):
                return True
            if hi is not None and rat_cmp(hi[0], c) <= 0:
                return False
        elif op == ">=":
            if lo is not None and rat_cmp(lo[0], c) >= 0:
                return True
            if hi is not None and (rat_cmp(hi[0], c) < 0
                                   or (rat_cmp(hi[0], c) == 0 and hi[1])):
                return False
        elif op == "<":
            if hi is not None and (rat_cmp(hi[0], c) < 0
                                   or (rat_cmp(hi[0], c) == 0 and hi[1])):
                return True
            if lo is not None and rat_cmp(lo[0], c) >= 0:
                return False
        else:  # "<="
            if hi is not None and rat_cmp(hi[0], c) <= 0:
                return True
            if lo is not None and (rat_cmp(lo[0], c) > 0
                                   or (rat_cmp(lo[0], c) == 0 and lo[1])):
                return False
        return None

    def propagate(self, queue):
        while queue:
            aid = queue.pop()
            var = self.atoms[aid][1]
            if self.atoms[aid][0] == "bool":
                continue
            state = self.var_state(var)
            if state is None:
                return False
            for other in self.var_atoms[var]:
                if self.assign[other] is not None:
                    continue
                forced = self.entailed(state, self.atoms[other])
                if forced is not None:
                    if not self.set_atom(other, forced):
                        return False
                    queue.append(other)
        return True

    # -- search ---------------------------------------------------------

    def eval3(self, node, memo, witness):
        if node is True or node is False:
            return node
        if isinstance(node, int):
            val = self.assign[node]
            if val is None and witness[0] is None:
                witness[0] = node
            return val
        key = id(node)
        if key in memo:
            return memo[key]
        kind = node[0]
        if kind == "not":
            inner = self.eval3(node[1], memo, witness)
            result = None if inner is None else (not inner)
        else:
            neutral, absorbing = (True, False) if kind == "and" else (False, True)
            result = neutral
            for child in node[1]:
                val = self.eval3(child, memo, witness)
                if val is absorbing:
                    result = absorbing
                    break
                if val is None:
                    result = None
        memo[key] = result
        return result

    def extract_units(self, node, polarity, queue):
        if node is True or node is False:
            if node is not polarity:
                return False
            return True
        if isinstance(node, int):
            if not self.set_atom(node, polarity):
                return False
            queue.append(node)
            return True
        kind = node[0]
        if kind == "not":
            return self.extract_units(node[1], not polarity, queue)
        if (kind == "and") == polarity:
            for child in node[1]:
                if not self.extract_units(child, polarity, queue):
                    return False
        return True

    def theory_consistent_all(self):
        for var, sort in self.sorts.items():
            if sort != "Bool" and var in self.var_atoms:
                if self.var_state(var) is None:
                    return False
        return True

    def search(self, root):
        witness = [None]
        value = self.eval3(root, {}, witness)
        if value is True:
            return self.theory_consistent_all()
        if value is False:
            return False
        branch = witness[0]
        for choice in (True, False):
            mark = len(self.trail)
            if self.set_atom(branch, choice) and self.propagate([branch]) \
                    and self.search(root):
                return True
            self.undo_to(mark)
        return False

    def check_sat(self):
        for aid in range(len(self.assign)):
            self.assign[aid] = None
        self.trail = []
        root = ("and", list(self.asserts)) if self.asserts else True
        queue = []
        if not self.extract_units(root, True, queue):
            self.last_model = None
            return "unsat"
        if not self.propagate(queue):
            self.last_model = None
            return "unsat"
        if self.search(root):
            self.last_model = self.build_model()
            return "sat"
        self.last_model = None
        return "unsat"

    # -- models -----------------------------------------------------------

    def build_model(self):
        model = []
        for var, sort in self.sorts.items():
            if sort == "Bool":
                value = "false"
                aid = self.atom_ids.get(("bool", var))
                if aid is not None and self.assign[aid]:
                    value = "true"
            elif sort == "String":
                value = self.pick_string(var)
            else:
                value = self.pick_number(var, sort)
            model.append((var, sort, value))
        return model

    def pick_string(self, var):
        pos, neg = (None, set())
        if var in self.var_atoms:
            state = self.var_state(var)
            if state is not None:
                pos, neg = state
        if pos is not None:
            chosen = pos
        else:
            chosen = ""
            k = 0
            while chosen in neg:
                chosen = f"v{k}"
                k += 1
        return '"' + chosen.replace('"', '""') + '"'

    def pick_number(self, var, sort):
        lo = hi = None
        neq = set()
        if var in self.var_atoms:
            state = self.var_state(var)
            if state is not None:
                lo, hi, neq = state
        if sort == "Int":
            value = self._pick_int(lo, hi, neq)
        else:
            value = self._pick_real(lo, hi, neq)
        text = rat_str((abs(value[0]), value[1]), sort == "Real")
        return f"(- {text})" if value[0] < 0 else text

    @staticmethod
    def _pick_int(lo, hi, neq):
        excluded = {rat_floor(e) for e in neq if rat_is_int(e)}
        if lo is not None:
            candidate = rat_floor(lo[0])
            step = 1
            limit = rat_floor(hi[0]) if hi is not None else None
        elif hi is not None:
            candidate = rat_floor(hi[0])
            step = -1
            limit = None
        else:
            candidate = 0
            step = 1
            limit = None
        while candidate in excluded:
            candidate += step
            if limit is not None and candidate > limit:
                raise SmtError("internal: no integer model value")
        return (candidate, 1)

    @staticmethod
    def _pick_real(lo, hi, neq):
        def ok(v):
            return all(rat_cmp(v, e) != 0 for e in neq)

        if lo is not None and hi is not None:
            if rat_cmp(lo[0], hi[0]) == 0:
                return lo[0]
            candidate = rat_mid(lo[0], hi[0])
            low = lo[0]
            while not ok(candidate):
                candidate = rat_mid(low, candidate)
            return candidate
        if lo is not None:
            candidate = rat_add_int(lo[0], 1)
        elif hi is not None:
            candidate = rat_add_int(hi[0], -1)
        else:
            candidate = (0, 1)
        while not ok(candidate):
            candidate = rat_add_int(candidate, 1 if hi is None else -1)
        return candidate

    # -- commands -----------------------------------------------------------

    def run(self, forms, out):
        for form in forms:
            if not isinstance(form, list) or not form:
                raise SmtError("expected a command")
            head = form[0]
            if head == "declare-const":
                if len(form) != 3 or not isinstance(form[1], str) \
                        or form[2] not in ("Int", "Real", "Bool", "String"):
                    raise SmtError("malformed declare-const")
                if form[1] in self.sorts or form[1] in self.macros:
                    raise SmtError(f"'{form[1]}' is already declared")
                self.sorts[form[1]] = form[2]
            elif head == "define-fun":
                if len(form) != 5 or not isinstance(form[1], str) \
                        or form[2] != [] or form[3] != "Bool":
                    raise SmtError("only zero-argument Bool definitions are supported")
                if form[1] in self.sorts or form[1] in self.macros:
                    raise SmtError(f"'{form[1]}' is already defined")
                self.macros[form[1]] = form[4]
            elif head == "assert":
                if len(form) != 2:
                    raise SmtError("malformed assert")
                self.asserts.append(self.build(form[1]))
            elif head == "check-sat":
                out.write(self.check_sat() + "\n")
            elif head == "get-model":
                if self.last_model is None:
                    raise SmtError("model is not available")
                out.write("(\n")
                for var, sort, value in self.last_model:
                    out.write(f"  (define-fun {var} () {sort} {value})\n")
                out.write(")\n")
            elif head in ("set-logic", "set-info", "set-option"):
                pass
            elif head == "exit":
                break
            else:
                raise SmtError(f"unsupported command '{head}'")


def main(argv):
    if len(argv) != 1:
        sys.stderr.write("usage: minismt.py <script.smt2>\n")
        return 2
    try:
        with open(argv[0], "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        sys.stderr.write(f"cannot read script: {exc}\n")
        return 2
    try:
        Solver().run(read_forms(text), sys.stdout)
    except SmtError as exc:
        message = str(exc).replace('"', "'")
        sys.stdout.write(f'(error "{message}")\n')
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
