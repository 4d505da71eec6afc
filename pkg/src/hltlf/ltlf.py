"""LTL over finite traces: formulas, surface syntax, evaluation and progression."""

import re

TRUE_OP = "true"
FALSE_OP = "false"
PROP = "prop"
NOT = "not"
AND = "and"
OR = "or"
IMPLIES = "implies"
NEXT = "next"
UNTIL = "until"
EVENTUALLY = "eventually"
ALWAYS = "always"
# internal: a proposition read at the current step during symbolic progression
NOW = "now"

BOOLEAN_OPS = (NOT, AND, OR, IMPLIES)
TEMPORAL_OPS = (NEXT, UNTIL, EVENTUALLY, ALWAYS)


class Formula:
    """Immutable syntax tree node.

    ``op`` names the variant, ``args`` holds child formulas and ``name`` the
    proposition identifier for ``prop`` nodes.  Nodes hash structurally and
    the hash is computed once.
    """

    __slots__ = ("op", "args", "name", "_hash", "_text")

    def __init__(self, op, args=(), name=None):
        self.op = op
        self.args = tuple(args)
        self.name = name
        self._hash = hash((op, name, self.args))
        self._text = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula) or self._hash != other._hash:
            return False
        return self.op == other.op and self.name == other.name and self.args == other.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Formula({render(self)!r})"

    def __str__(self):
        return render(self)

    # operator sugar, handy in tests and demos
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


TRUE = Formula(TRUE_OP)
FALSE = Formula(FALSE_OP)


def Prop(name):
    return Formula(PROP, name=name)


def Not(f):
    return Formula(NOT, (f,))


def And(a, b):
    return Formula(AND, (a, b))


def Or(a, b):
    return Formula(OR, (a, b))


def Implies(a, b):
    return Formula(IMPLIES, (a, b))


def Next(f):
    return Formula(NEXT, (f,))


def Until(a, b):
    return Formula(UNTIL, (a, b))


def Eventually(f):
    return Formula(EVENTUALLY, (f,))


def Always(f):
    return Formula(ALWAYS, (f,))


# conjoined to the argument of a strong next during progression: it holds on
# every nonempty suffix and fails on the empty one
NONEMPTY = Eventually(TRUE)


def propositions(f):
    """Set of proposition names occurring in ``f``."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.op in (PROP, NOW):
            out.add(g.name)
        else:
            stack.extend(g.args)
    return frozenset(out)


def depth(f):
    if not f.args:
        return 0
    return 1 + max(depth(a) for a in f.args)


def to_core(f):
    """Rewrite derived operators into true, props, not, and, next, until."""
    op = f.op
    if op in (TRUE_OP, PROP):
        return f
    if op == FALSE_OP:
        return Not(TRUE)
    a = [to_core(x) for x in f.args]
    if op == NOT:
        return Not(a[0])
    if op == AND:
        return And(a[0], a[1])
    if op == OR:
        return Not(And(Not(a[0]), Not(a[1])))
    if op == IMPLIES:
        return Not(And(a[0], Not(a[1])))
    if op == NEXT:
        return Next(a[0])
    if op == UNTIL:
        return Until(a[0], a[1])
    if op == EVENTUALLY:
        return Until(TRUE, a[0])
    if op == ALWAYS:
        return Not(Until(TRUE, Not(a[0])))
    raise ValueError(f"unknown operator {op}")


# ---------------------------------------------------------------------------
# surface syntax

class FormulaSyntaxError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_ALIASES = {
    "◇": "F", "♢": "F", "◊": "F",
    "□": "G", "◻": "G",
    "○": "X", "◯": "X",
    "∧": "&&", "∨": "||", "¬": "!",
    "⇒": "->", "→": "->",
    "𝒰": "U",
    "⊤": "true", "⊥": "false",
}
_KEYWORDS = {"true", "false", "X", "F", "G", "U"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(text):
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c.isspace():
            col, i = col + 1, i + 1
            continue
        if c in _ALIASES:
            tokens.append((_ALIASES[c], line, col))
            col, i = col + 1, i + 1
            continue
        two = text[i:i + 2]
        if two in ("&&", "||", "->"):
            tokens.append((two, line, col))
            col, i = col + 2, i + 2
            continue
        if c in "()!":
            tokens.append((c, line, col))
            col, i = col + 1, i + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            kind = word if word in _KEYWORDS else "ident"
            tokens.append((kind, line, col, word) if kind == "ident" else (kind, line, col))
            col += len(word)
            i = m.end()
            continue
        raise FormulaSyntaxError(f"unknown operator token {c!r}", line, col)
    tokens.append(("eof", line, col))
    return tokens


class _Parser:
    # binding strength of binary operators; higher binds tighter
    BINARY = {"->": (1, "right"), "||": (2, "left"), "&&": (3, "left"), "U": (4, "right")}

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(message, tok[1], tok[2])

    def parse(self):
        if self.peek()[0] == "eof":
            self.error("empty formula")
        f = self.binary(1)
        if self.peek()[0] != "eof":
            self.error(f"unexpected token {self.peek()[0]!r}")
        return f

    def binary(self, min_level):
        left = self.unary()
        while True:
            kind = self.peek()[0]
            if kind not in self.BINARY:
                return left
            level, assoc = self.BINARY[kind]
            if level < min_level:
                return left
            self.take()
            right = self.binary(level if assoc == "right" else level + 1)
            left = {"->": Implies, "||": Or, "&&": And, "U": Until}[kind](left, right)

    def unary(self):
        tok = self.take()
        kind = tok[0]
        if kind == "!":
            return Not(self.unary())
        if kind == "X":
            return Next(self.unary())
        if kind == "F":
            return Eventually(self.unary())
        if kind == "G":
            return Always(self.unary())
        if kind == "true":
            return TRUE
        if kind == "false":
            return FALSE
        if kind == "ident":
            return Prop(tok[3])
        if kind == "(":
            inner = self.binary(1)
            if self.peek()[0] != ")":
                self.error("expected ')'")
            self.take()
            return inner
        if kind == "eof":
            self.error("unexpected end of formula", tok)
        self.error(f"unexpected token {kind!r}", tok)


def parse_formula(text):
    """Parse the ASCII (or Unicode) surface syntax into a :class:`Formula`."""
    return _Parser(text).parse()


_LEVEL = {IMPLIES: 1, OR: 2, AND: 3, UNTIL: 4}
_SYMBOL = {IMPLIES: "->", OR: "||", AND: "&&", UNTIL: "U"}
_UNARY = {NOT: "!", NEXT: "X ", EVENTUALLY: "F ", ALWAYS: "G "}


def render(f):
    """Text that parses back to a structurally equal formula."""
    if f._text is not None:
        return f._text
    op = f.op
    if op == TRUE_OP:
        text = "true"
    elif op == FALSE_OP:
        text = "false"
    elif op in (PROP, NOW):
        text = f.name
    elif op in _UNARY:
        child = f.args[0]
        inner = render(child)
        if child.op in _LEVEL:
            inner = f"({inner})"
        text = _UNARY[op] + inner
    else:
        level = _LEVEL[op]
        right_assoc = op in (IMPLIES, UNTIL)
        a, b = f.args
        left, right = render(a), render(b)
        la, lb = _LEVEL.get(a.op, 9), _LEVEL.get(b.op, 9)
        if la < level or (la == level and right_assoc):
            left = f"({left})"
        if lb < level or (lb == level and not right_assoc):
            right = f"({right})"
        text = f"{left} {_SYMBOL[op]} {right}"
    f._text = text
    return text


# ---------------------------------------------------------------------------
# semantics

def _truth_table(f, word, memo):
    got = memo.get(f)
    if got is not None:
        return got
    n = len(word)
    op = f.op
    if op == TRUE_OP:
        out = [True] * n
    elif op == FALSE_OP:
        out = [False] * n
    elif op in (PROP, NOW):
        out = [f.name in s for s in word]
    elif op == NOT:
        out = [not x for x in _truth_table(f.args[0], word, memo)]
    elif op == AND:
        a, b = (_truth_table(x, word, memo) for x in f.args)
        out = [x and y for x, y in zip(a, b)]
    elif op == OR:
        a, b = (_truth_table(x, word, memo) for x in f.args)
        out = [x or y for x, y in zip(a, b)]
    elif op == IMPLIES:
        a, b = (_truth_table(x, word, memo) for x in f.args)
        out = [(not x) or y for x, y in zip(a, b)]
    elif op == NEXT:
        a = _truth_table(f.args[0], word, memo)
        out = a[1:] + [False]
    elif op == UNTIL:
        a, b = (_truth_table(x, word, memo) for x in f.args)
        out = [False] * n
        later = False
        for i in range(n - 1, -1, -1):
            later = b[i] or (a[i] and later)
            out[i] = later
    elif op == EVENTUALLY:
        a = _truth_table(f.args[0], word, memo)
        out = [False] * n
        later = False
        for i in range(n - 1, -1, -1):
            later = later or a[i]
            out[i] = later
    elif op == ALWAYS:
        a = _truth_table(f.args[0], word, memo)
        out = [False] * n
        later = True
        for i in range(n - 1, -1, -1):
            later = later and a[i]
            out[i] = later
    else:
        raise ValueError(f"unknown operator {op}")
    memo[f] = out
    return out


def evaluate(f, word, i=0):
    """Whether ``word`` satisfies ``f`` at instant ``i``.

    ``word`` is a nonempty sequence of proposition sets.  A next at the last
    instant is false.
    """
    word = [frozenset(s) for s in word]
    if not word:
        raise ValueError("evaluate needs a nonempty word")
    if not 0 <= i < len(word):
        raise IndexError(f"instant {i} outside word of length {len(word)}")
    return _truth_table(f, word, {})[i]


def holds_on_empty(f):
    """Truth of a residual obligation on the empty suffix.

    Propositions, next, until and eventually need a position and fail;
    always holds vacuously; Boolean connectives are classical.
    """
    op = f.op
    if op == TRUE_OP or op == ALWAYS:
        return True
    if op in (FALSE_OP, PROP, NOW, NEXT, UNTIL, EVENTUALLY):
        return False
    if op == NOT:
        return not holds_on_empty(f.args[0])
    if op == AND:
        return holds_on_empty(f.args[0]) and holds_on_empty(f.args[1])
    if op == OR:
        return holds_on_empty(f.args[0]) or holds_on_empty(f.args[1])
    if op == IMPLIES:
        return (not holds_on_empty(f.args[0])) or holds_on_empty(f.args[1])
    raise ValueError(f"unknown operator {op}")


# ---------------------------------------------------------------------------
# Boolean simplification and progression

def _key(f):
    return (render(f), f.op)


def mk_not(f):
    if f.op == TRUE_OP:
        return FALSE
    if f.op == FALSE_OP:
        return TRUE
    if f.op == NOT:
        return f.args[0]
    return Not(f)


def _flatten(op, items):
    out = []
    stack = list(reversed(items))
    while stack:
        g = stack.pop()
        if g.op == op:
            stack.extend(reversed(g.args))
        else:
            out.append(g)
    return out


def _mk_nary(op, items):
    unit, zero = (TRUE, FALSE) if op == AND else (FALSE, TRUE)
    seen = {}
    for g in _flatten(op, items):
        if g == zero:
            return zero
        if g == unit:
            continue
        seen[g] = None
    for g in seen:
        if mk_not(g) in seen:
            return zero
    # absorption: x || (x && y) = x and x && (x || y) = x
    dual = OR if op == AND else AND
    for g in [g for g in seen if g.op == dual]:
        if any(h in seen for h in _flatten(dual, [g])):
            del seen[g]
    if not seen:
        return unit
    parts = sorted(seen, key=_key)
    out = parts[-1]
    for g in reversed(parts[:-1]):
        out = Formula(op, (g, out))
    return out


def mk_and(*items):
    return _mk_nary(AND, items)


def mk_or(*items):
    return _mk_nary(OR, items)


def simplify(f):
    """Canonical form: Boolean layers flattened, deduplicated and sorted."""
    op = f.op
    if op in (TRUE_OP, FALSE_OP, PROP, NOW):
        return f
    args = [simplify(a) for a in f.args]
    if op == NOT:
        return mk_not(args[0])
    if op == AND:
        return mk_and(*args)
    if op == OR:
        return mk_or(*args)
    if op == IMPLIES:
        return mk_or(mk_not(args[0]), args[1])
    return _fold_temporal(op, args)


def _fold_temporal(op, args):
    # rewrites that hold on every suffix, the empty one included
    x = args[0]
    if op == NEXT and x == FALSE:
        return FALSE
    if op == EVENTUALLY:
        if x == FALSE:
            return FALSE
        if x.op == EVENTUALLY:
            return x
    if op == ALWAYS:
        if x == TRUE:
            return TRUE
        if x.op == ALWAYS:
            return x
    if op == UNTIL:
        y = args[1]
        if y == FALSE:
            return FALSE
        if y == TRUE:
            return NONEMPTY
        if x == FALSE:
            return mk_and(y, NONEMPTY)
        if x == TRUE:
            return _fold_temporal(EVENTUALLY, [y])
    return Formula(op, tuple(args))


def _prog(f, step, memo):
    got = memo.get(f)
    if got is not None:
        return got
    op = f.op
    if op in (TRUE_OP, FALSE_OP):
        out = f
    elif op == PROP:
        out = step(f.name)
    elif op == NOT:
        out = mk_not(_prog(f.args[0], step, memo))
    elif op == AND:
        out = mk_and(_prog(f.args[0], step, memo), _prog(f.args[1], step, memo))
    elif op == OR:
        out = mk_or(_prog(f.args[0], step, memo), _prog(f.args[1], step, memo))
    elif op == IMPLIES:
        out = mk_or(mk_not(_prog(f.args[0], step, memo)), _prog(f.args[1], step, memo))
    elif op == NEXT:
        out = mk_and(f.args[0], NONEMPTY)
    elif op == UNTIL:
        out = mk_or(_prog(f.args[1], step, memo), mk_and(_prog(f.args[0], step, memo), f))
    elif op == EVENTUALLY:
        out = mk_or(_prog(f.args[0], step, memo), f)
    elif op == ALWAYS:
        out = mk_and(_prog(f.args[0], step, memo), f)
    else:
        raise ValueError(f"cannot progress operator {op}")
    memo[f] = out
    return out


def progress(f, symbol):
    """Residual obligation after reading one symbol (a set of true propositions).

    A strong next leaves its argument conjoined with a nonempty-suffix marker
    so the residual stays exact when the word ends right after.
    """
    symbol = frozenset(symbol)
    return _prog(f, lambda name: TRUE if name in symbol else FALSE, {})


def progress_symbolic(f):
    """Progression with the current symbol left open.

    Propositions read at the current step become ``now`` atoms; the result is
    a Boolean combination of those atoms and residual obligations.
    """
    return _prog(f, lambda name: Formula(NOW, name=name), {})


def substitute_now(f, name, value):
    op = f.op
    if op == NOW:
        return (TRUE if value else FALSE) if f.name == name else f
    if op == NOT:
        return mk_not(substitute_now(f.args[0], name, value))
    if op == AND:
        return mk_and(*(substitute_now(a, name, value) for a in f.args))
    if op == OR:
        return mk_or(*(substitute_now(a, name, value) for a in f.args))
    return f


def now_atoms(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.op == NOW:
            out.add(g.name)
        elif g.op in (NOT, AND, OR):
            stack.extend(g.args)
    return out


def evaluate_propositional(f, symbol):
    """Truth of a temporal-operator-free formula under one symbol."""
    op = f.op
    if op == TRUE_OP:
        return True
    if op == FALSE_OP:
        return False
    if op in (PROP, NOW):
        return f.name in symbol
    if op == NOT:
        return not evaluate_propositional(f.args[0], symbol)
    if op == AND:
        return evaluate_propositional(f.args[0], symbol) and evaluate_propositional(f.args[1], symbol)
    if op == OR:
        return evaluate_propositional(f.args[0], symbol) or evaluate_propositional(f.args[1], symbol)
    if op == IMPLIES:
        return (not evaluate_propositional(f.args[0], symbol)) or evaluate_propositional(f.args[1], symbol)
    raise ValueError(f"temporal operator {op} in propositional formula")
