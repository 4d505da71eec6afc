"""Hierarchical specifications: loading, validation, output words and temporal order."""

from collections import deque
from itertools import combinations

from . import ltlf
from .automata import translate

PRECEDES = "≺"
FOLLOWS = "≻"
INDEPENDENT = "∥"


class SpecError(ValueError):
    """Invalid specification document; ``rule`` names the violated condition."""

    def __init__(self, message, rule="syntax", line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{rule}: {message}{where}")
        self.rule = rule
        self.line = line


class HierarchySpec:
    """Levels of named formulas plus the tree they induce.

    ``levels[k]`` lists the names at level k+1; ``formulas`` maps a name to its
    formula.  The tree has an edge from a formula to every specification it
    mentions as a composite proposition.
    """

    def __init__(self, levels, formulas, alphabet):
        self.levels = [list(level) for level in levels]
        self.formulas = dict(formulas)
        self.alphabet = frozenset(alphabet)
        self._validate()
        self.root = self.levels[0][0]
        self.level_of = {n: k + 1 for k, level in enumerate(self.levels) for n in level}
        self.children = {}
        self.parent = {}
        for k, level in enumerate(self.levels):
            below = self.levels[k + 1] if k + 1 < len(self.levels) else []
            for name in level:
                props = ltlf.propositions(self.formulas[name])
                kids = tuple(n for n in below if n in props)
                self.children[name] = kids
                for kid in kids:
                    self.parent[kid] = name
        self.names = [n for level in self.levels for n in level]
        self.leaves = tuple(n for n in self.names if not self.children[n])
        self.nonleaves = tuple(n for n in self.names if self.children[n])

    def _validate(self):
        levels, formulas, alphabet = self.levels, self.formulas, self.alphabet
        if not levels or not levels[0]:
            raise SpecError("no levels defined", "structure")
        if len(levels[0]) != 1:
            raise SpecError(f"level 1 holds {len(levels[0])} formulas, expected exactly one", "single-root")
        seen = set()
        for level in levels:
            for name in level:
                if name in seen:
                    raise SpecError(f"name {name!r} defined twice", "unique-names")
                seen.add(name)
        clash = seen & alphabet
        if clash:
            raise SpecError(f"names {sorted(clash)} are both atomic and composite", "disjoint-namespaces")
        for k, level in enumerate(levels):
            below = set(levels[k + 1]) if k + 1 < len(levels) else set()
            for name in level:
                props = ltlf.propositions(formulas[name])
                atomic = props & alphabet
                composite = props & below
                unknown = props - alphabet - below
                if unknown:
                    elsewhere = unknown & seen
                    if elsewhere:
                        raise SpecError(f"{name} refers to {sorted(elsewhere)} outside the next level", "dangling-composite")
                    raise SpecError(f"{name} uses unknown names {sorted(unknown)}", "dangling-composite")
                if atomic and composite:
                    raise SpecError(f"{name} mixes atomic and composite propositions", "homogeneous-formula")
        for k in range(1, len(levels)):
            for name in levels[k]:
                owners = [p for p in levels[k - 1] if name in ltlf.propositions(formulas[p])]
                if len(owners) != 1:
                    raise SpecError(f"{name} appears in {len(owners)} formulas of level {k}, expected one",
                                    "unique-parent")

    def parents(self, name):
        """Path from ``name`` (excluded) up to the root."""
        out = []
        while name in self.parent:
            name = self.parent[name]
            out.append(name)
        return out

    def ancestors_or_self(self, name):
        return [name] + self.parents(name)

    @property
    def depth(self):
        return len(self.levels)

    def tree_edges(self):
        return [(p, c) for p in self.names for c in self.children[p]]

    def to_text(self):
        lines = ["hltlf v1", "alphabet: " + " ".join(sorted(self.alphabet))]
        for k, level in enumerate(self.levels):
            lines.append(f"level {k + 1}:")
            for name in level:
                lines.append(f"  {name} = {ltlf.render(self.formulas[name])}")
        return "\n".join(lines) + "\n"

    def to_dot(self):
        """Tree in Graphviz text with leaves filled green."""
        lines = ["digraph hierarchy {", "  node [shape=box];"]
        for name in self.names:
            text = f"{name} = {ltlf.render(self.formulas[name])}".replace('"', '\\"')
            style = ' style=filled fillcolor="palegreen"' if name in self.leaves else ""
            lines.append(f'  "{name}" [label="{text}"{style}];')
        for p, c in self.tree_edges():
            lines.append(f'  "{p}" -> "{c}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def parse_spec(text):
    """Parse the ``hltlf v1`` document format."""
    lines = text.splitlines()
    body = []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            body.append((no, line))
    if not body or body[0][1] != "hltlf v1":
        raise SpecError("missing 'hltlf v1' header", "syntax", body[0][0] if body else 1)
    if len(body) < 2 or not body[1][1].startswith("alphabet:"):
        raise SpecError("missing 'alphabet:' line", "syntax", body[1][0] if len(body) > 1 else 1)
    alphabet = body[1][1][len("alphabet:"):].split()
    for a in alphabet:
        if not ltlf._IDENT.fullmatch(a) or a in ltlf._KEYWORDS:
            raise SpecError(f"bad proposition name {a!r}", "syntax", body[1][0])
    levels, formulas = [], {}
    for no, line in body[2:]:
        if line.startswith("level") and line.endswith(":"):
            try:
                k = int(line[len("level"):-1])
            except ValueError:
                raise SpecError(f"bad level header {line!r}", "syntax", no) from None
            if k != len(levels) + 1:
                raise SpecError(f"level {k} out of sequence", "syntax", no)
            levels.append([])
            continue
        if "=" not in line:
            raise SpecError(f"expected 'name = formula', got {line!r}", "syntax", no)
        if not levels:
            raise SpecError("formula before any level header", "syntax", no)
        name, text_f = (s.strip() for s in line.split("=", 1))
        if not ltlf._IDENT.fullmatch(name) or name in ltlf._KEYWORDS:
            raise SpecError(f"bad specification name {name!r}", "syntax", no)
        if name in formulas:
            raise SpecError(f"name {name!r} defined twice", "unique-names", no)
        try:
            formulas[name] = ltlf.parse_formula(text_f)
        except ltlf.FormulaSyntaxError as e:
            raise SpecError(str(e), "syntax", no) from None
        levels[-1].append(name)
    return HierarchySpec(levels, formulas, alphabet)


def load_spec(path_or_text):
    text = path_or_text
    if "\n" not in str(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    return parse_spec(text)


class StateSpecSequence:
    """Timed pairing of every robot state with a leaf name or ``None`` (idle)."""

    def __init__(self, rows):
        self.rows = [tuple((s, psi) for s, psi in row) for row in rows]
        if self.rows:
            n = len(self.rows[0])
            if any(len(row) != n for row in self.rows):
                raise ValueError("every instant must list the same robots")

    @property
    def horizon(self):
        return len(self.rows) - 1

    @property
    def n_robots(self):
        return len(self.rows[0]) if self.rows else 0

    def __len__(self):
        return len(self.rows)

    def trace(self, r):
        return [row[r][0] for row in self.rows]

    def assignments(self, r):
        return [row[r][1] for row in self.rows]


def _label(labelers, r, state):
    lab = labelers[r]
    try:
        out = lab(state) if callable(lab) else lab[state]
    except (KeyError, IndexError):
        raise ValueError(f"state {state!r} is not valid for robot {r}") from None
    return frozenset(out)


def input_word(tau, spec, phi, labelers, outputs=None):
    """Input word of ``phi``: robot observations for leaves, child marks otherwise."""
    if phi in spec.leaves:
        word = []
        for row in tau.rows:
            sym = set()
            for r, (s, psi) in enumerate(row):
                if psi == phi:
                    sym |= _label(labelers, r, s)
            word.append(frozenset(sym))
        return word
    outputs = outputs if outputs is not None else {}
    kids = {c: generate_output_word(tau, spec, c, labelers, outputs) for c in spec.children[phi]}
    return [frozenset(c for c, w in kids.items() if w[i]) for i in range(len(tau.rows))]


def marks(f, word):
    """Instants where the segment since the previous mark satisfies ``f``."""
    out = [False] * len(word)
    last = -1
    for j in range(len(word)):
        if ltlf.evaluate(f, word[last + 1:j + 1], 0):
            out[j] = True
            last = j
    return out


def generate_output_word(tau, spec, phi, labelers, _outputs=None):
    """Output word of ``phi`` as a list of booleans (True where ``{phi}``)."""
    if phi not in spec.formulas:
        raise KeyError(f"unknown specification {phi!r}")
    for row in tau.rows:
        for _, psi in row:
            if psi is not None and psi not in spec.leaves:
                raise ValueError(f"assignment {psi!r} is not a leaf specification")
    outputs = _outputs if _outputs is not None else {}
    if phi in outputs:
        return outputs[phi]
    word = input_word(tau, spec, phi, labelers, outputs)
    out = marks(spec.formulas[phi], word) if word else []
    outputs[phi] = out
    return out


def output_words(tau, spec, labelers):
    """Output words of every specification, keyed by name."""
    outputs = {}
    generate_output_word(tau, spec, spec.root, labelers, outputs)
    return outputs


def satisfies(tau, spec, labelers):
    """True when the root specification is marked at some instant.

    An empty sequence satisfies the root exactly when its formula holds on the
    empty trace.
    """
    if not tau.rows:
        return ltlf.holds_on_empty(spec.formulas[spec.root])
    return any(generate_output_word(tau, spec, spec.root, labelers))


def _one_time_search(nfa, children, track=None):
    """Accepting words over ``children`` using each child at most once.

    Returns the set of reachable accepting summaries.  With ``track = (x, y)``
    a summary is ``(x_first, y_first, both)``; otherwise it is ``True``.
    """
    kids = list(children)
    bit = {c: 1 << i for i, c in enumerate(kids)}
    full = (1 << len(kids)) - 1
    start = (nfa.initial, 0, False, False, 0)
    seen = {start}
    queue = deque([start])
    found = set()
    while queue:
        states, used, xf, yf, length = queue.popleft()
        if length and states & nfa.accepting:
            if track is None:
                found.add(True)
                return found
            x, y = track
            both = bool(used & bit[x]) and bool(used & bit[y])
            found.add((xf, yf, both))
        free = [c for c in kids if not used & bit[c]]
        for r in range(len(free) + 1):
            for combo in combinations(free, r):
                sym = frozenset(combo)
                nxt = nfa.step_set(states, sym)
                if not nxt:
                    continue
                nused = used
                for c in combo:
                    nused |= bit[c]
                nxf, nyf = xf, yf
                if track is not None:
                    x, y = track
                    if y in sym and x not in sym and not used & bit[x]:
                        nyf = True
                    if x in sym and y not in sym and not used & bit[y]:
                        nxf = True
                node = (nxt, nused & full, nxf, nyf, 1)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
    return found


def check_bounded_one_time(spec, automata=None):
    """Per non-leaf, whether an accepting word uses each child at most once."""
    automata = automata or {}
    out = {}
    for name in spec.nonleaves:
        nfa = automata.get(name) or translate(spec.formulas[name])
        out[name] = bool(_one_time_search(nfa, spec.children[name]))
    return out


def child_order(nfa, children):
    """Pairwise order between the children of one non-leaf formula."""
    rel = {}
    for x, y in combinations(children, 2):
        summaries = _one_time_search(nfa, children, (x, y))
        both = any(s[2] for s in summaries)
        y_first = any(s[1] for s in summaries)
        x_first = any(s[0] for s in summaries)
        if both and not y_first:
            rel[(x, y)], rel[(y, x)] = PRECEDES, FOLLOWS
        elif both and not x_first:
            rel[(x, y)], rel[(y, x)] = FOLLOWS, PRECEDES
        else:
            rel[(x, y)] = rel[(y, x)] = INDEPENDENT
    return rel


def infer_temporal_order(spec, automata=None):
    """Order relation over ordered pairs of distinct leaves.

    Two leaves inherit the order between the children of their lowest common
    ancestor that lie on their respective branches.
    """
    automata = automata or {}
    local = {}
    for name in spec.nonleaves:
        nfa = automata.get(name) or translate(spec.formulas[name])
        local[name] = child_order(nfa, spec.children[name])
    rel = {}
    for a, b in combinations(spec.leaves, 2):
        up_a = spec.ancestors_or_self(a)
        up_b = spec.ancestors_or_self(b)
        common = next(n for n in up_a if n in up_b)
        ca = up_a[up_a.index(common) - 1]
        cb = up_b[up_b.index(common) - 1]
        r = local[common][(ca, cb)]
        rel[(a, b)] = r
        rel[(b, a)] = {PRECEDES: FOLLOWS, FOLLOWS: PRECEDES}.get(r, r)
    return rel


def predecessors(relation, leaves):
    """Leaves that must be completed before each leaf."""
    return {l: frozenset(o for o in leaves if relation.get((o, l)) == PRECEDES) for l in leaves}
