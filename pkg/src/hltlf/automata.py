"""Finite automata for LTLf formulas.

Translation is progression based: every state is a simplified residual
obligation, the formula itself is the initial state, and a state accepts when
its residual holds on the empty suffix.  Guards stay symbolic as sets of cubes
(conjunctions of literals) over the propositions the residual mentions.
"""

from collections import deque
from itertools import product as iproduct

from . import ltlf
from .ltlf import TRUE, FALSE, Prop, mk_and, mk_or, mk_not


class TranslationLimitError(RuntimeError):
    pass


class DeterminizationLimitError(RuntimeError):
    pass


class Guard:
    """Disjunction of cubes; a cube is a tuple of ``(name, value)`` literals."""

    __slots__ = ("cubes", "props", "_formula")

    def __init__(self, cubes):
        self.cubes = tuple(sorted(set(tuple(sorted(c)) for c in cubes)))
        self.props = frozenset(n for c in self.cubes for n, _ in c)
        self._formula = None

    def holds(self, symbol):
        for cube in self.cubes:
            for name, value in cube:
                if (name in symbol) != value:
                    break
            else:
                return True
        return False

    @property
    def formula(self):
        if self._formula is None:
            terms = []
            for cube in self.cubes:
                lits = [Prop(n) if v else mk_not(Prop(n)) for n, v in cube]
                terms.append(mk_and(*lits))
            self._formula = mk_or(*terms) if terms else FALSE
        return self._formula

    def is_true(self):
        return () in self.cubes

    def __eq__(self, other):
        return isinstance(other, Guard) and self.cubes == other.cubes

    def __hash__(self):
        return hash(self.cubes)

    def __repr__(self):
        return f"Guard({ltlf.render(self.formula)!r})"

    @classmethod
    def from_formula(cls, f):
        """Guard equivalent to a temporal-free formula (via its truth table)."""
        names = sorted(ltlf.propositions(f))
        cubes = []
        for values in iproduct((True, False), repeat=len(names)):
            sym = {n for n, v in zip(names, values) if v}
            if ltlf.evaluate_propositional(f, sym):
                cubes.append(tuple(zip(names, values)))
        return cls(_merge_cubes(cubes))


TRUE_GUARD = Guard([()])


def _merge_cubes(cubes):
    """Combine cubes that differ in the value of exactly one literal."""
    current = set(tuple(sorted(c)) for c in cubes)
    changed = True
    while changed:
        changed = False
        items = sorted(current)
        index = {c: i for i, c in enumerate(items)}
        merged = set()
        used = set()
        for c in items:
            for k, (name, value) in enumerate(c):
                partner = c[:k] + ((name, not value),) + c[k + 1:]
                if partner in index and partner not in used and c not in used and partner != c:
                    merged.add(c[:k] + c[k + 1:])
                    used.add(c)
                    used.add(partner)
                    changed = True
                    break
        current = merged | (set(items) - used)
    # drop cubes subsumed by a more general one
    out = []
    for c in sorted(current, key=len):
        if not any(set(o) <= set(c) for o in out):
            out.append(c)
    return out


class Nfa:
    """Nondeterministic finite automaton with symbolic guards.

    States are arbitrary hashables; ``labels`` optionally maps states to the
    residual formulas they stand for.
    """

    def __init__(self, states, initial, accepting, transitions, alphabet, labels=None):
        self.states = tuple(states)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.transitions = tuple(transitions)
        self.alphabet = frozenset(alphabet)
        self.labels = dict(labels or {})
        known = set(self.states)
        for src, guard, dst in self.transitions:
            if src not in known or dst not in known:
                raise ValueError(f"transition endpoint outside state set: {src} -> {dst}")
            if not guard.props <= self.alphabet:
                raise ValueError(f"guard {guard} uses propositions outside the alphabet")
        if not self.initial <= known or not self.accepting <= known:
            raise ValueError("initial or accepting states outside state set")
        self.out = {q: [] for q in self.states}
        for src, guard, dst in self.transitions:
            self.out[src].append((guard, dst))
        self._cache = {}

    def step(self, q, symbol):
        """Targets of ``q`` under a symbol (a frozenset of true propositions)."""
        key = (q, symbol)
        got = self._cache.get(key)
        if got is None:
            got = tuple(dict.fromkeys(dst for guard, dst in self.out[q] if guard.holds(symbol)))
            self._cache[key] = got
        return got

    def step_set(self, qs, symbol):
        out = set()
        for q in qs:
            out.update(self.step(q, symbol))
        return frozenset(out)

    def successors(self, q):
        return {dst for _, dst in self.out[q]}

    def guard_props(self):
        out = set()
        for _, guard, _ in self.transitions:
            out |= guard.props
        return frozenset(out)

    def with_initial(self, initial):
        return Nfa(self.states, initial, self.accepting, self.transitions, self.alphabet, self.labels)

    def with_accepting(self, accepting):
        return Nfa(self.states, self.initial, accepting, self.transitions, self.alphabet, self.labels)

    def __repr__(self):
        return (f"Nfa(states={len(self.states)}, transitions={len(self.transitions)}, "
                f"initial={sorted(self.initial, key=repr)}, accepting={sorted(self.accepting, key=repr)})")


def _split(h, cube, out):
    atoms = ltlf.now_atoms(h)
    if not atoms:
        out.append((cube, h))
        return
    name = min(atoms)
    for value in (True, False):
        _split(ltlf.substitute_now(h, name, value), cube + ((name, value),), out)


def residual_transitions(g):
    """Map each residual reachable in one step from ``g`` to its cube list."""
    branches = []
    _split(ltlf.progress_symbolic(g), (), branches)
    grouped = {}
    for cube, target in branches:
        grouped.setdefault(target, []).append(cube)
    return grouped


_BOOLEAN = (ltlf.NOT, ltlf.AND, ltlf.OR, ltlf.TRUE_OP, ltlf.FALSE_OP)
_SIGNATURE_ATOMS = 14


def _temporal_atoms(g):
    out = set()
    stack = [g]
    while stack:
        h = stack.pop()
        if h.op in _BOOLEAN:
            stack.extend(h.args)
        else:
            out.add(h)
    return sorted(out, key=ltlf.render)


def _truth(g, val):
    op = g.op
    if op == ltlf.TRUE_OP:
        return True
    if op == ltlf.FALSE_OP:
        return False
    if op == ltlf.NOT:
        return not _truth(g.args[0], val)
    if op == ltlf.AND:
        return all(_truth(h, val) for h in g.args)
    if op == ltlf.OR:
        return any(_truth(h, val) for h in g.args)
    return val[g]


def _signature(g):
    """Key shared by residuals that are the same Boolean function of their
    temporal subformulas, so equivalent residuals become one state."""
    atoms = _temporal_atoms(g)
    if len(atoms) > _SIGNATURE_ATOMS:
        return g
    n = len(atoms)
    table = []
    for bits in range(1 << n):
        val = {a: bool(bits >> i & 1) for i, a in enumerate(atoms)}
        table.append(_truth(g, val))
    # drop atoms the function does not depend on
    keep = []
    for i, a in enumerate(atoms):
        m = 1 << i
        if any(table[b] != table[b | m] for b in range(1 << n) if not b & m):
            keep.append(i)
    bits_out = 0
    for j in range(1 << len(keep)):
        b = sum(1 << keep[k] for k in range(len(keep)) if j >> k & 1)
        bits_out |= table[b] << j
    return tuple(atoms[i] for i in keep), bits_out


def translate(f, cap=10000):
    """NFA accepting exactly the nonempty words satisfying ``f``."""
    alphabet = ltlf.propositions(f)
    start = ltlf.simplify(f)
    index = {_signature(start): 0}
    order = [start]
    edges = []
    queue = deque([0])
    while queue:
        src = queue.popleft()
        merged = {}
        for target, cubes in residual_transitions(order[src]).items():
            if target == FALSE:
                continue
            key = _signature(target)
            if key == ((), 0):
                continue
            if key not in index:
                if len(index) >= cap:
                    raise TranslationLimitError(f"translation of {ltlf.render(f)} exceeds {cap} states")
                index[key] = len(order)
                order.append(target)
                queue.append(index[key])
            merged.setdefault(index[key], []).extend(cubes)
        for dst, cubes in merged.items():
            edges.append((src, Guard(_merge_cubes(cubes)), dst))
    accepting = {i for i, g in enumerate(order) if ltlf.holds_on_empty(g)}
    # keep only states that can still reach acceptance (the initial one always stays)
    back = {i: set() for i in range(len(order))}
    for src, _, dst in edges:
        back[dst].add(src)
    alive = set(accepting)
    stack = list(accepting)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in alive:
                alive.add(p)
                stack.append(p)
    keep = [i for i in range(len(order)) if i in alive or i == 0]
    renum = {old: new for new, old in enumerate(keep)}
    transitions = [(renum[s], gd, renum[d]) for s, gd, d in edges if s in renum and d in renum and d in alive]
    labels = {renum[i]: order[i] for i in keep}
    return Nfa(range(len(keep)), {0}, {renum[i] for i in accepting if i in renum}, transitions, alphabet, labels)


def accepts(a, word):
    """Whether some run of ``a`` on ``word`` ends in an accepting state."""
    current = a.initial
    for symbol in word:
        current = a.step_set(current, frozenset(symbol))
        if not current:
            return False
    return bool(current & a.accepting)


def reachable(a):
    seen = set(a.initial)
    stack = list(a.initial)
    while stack:
        q = stack.pop()
        for p in a.successors(q):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def coreachable(a):
    back = {q: set() for q in a.states}
    for src, _, dst in a.transitions:
        back[dst].add(src)
    seen = set(a.accepting)
    stack = list(a.accepting)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def is_empty(a):
    return not (reachable(a) & a.accepting)


def symbols_over(props, cap=1 << 16):
    props = sorted(props)
    if (1 << len(props)) > cap:
        raise DeterminizationLimitError(f"alphabet of {len(props)} propositions is too large")
    out = []
    for values in iproduct((False, True), repeat=len(props)):
        out.append(frozenset(p for p, v in zip(props, values) if v))
    return out


def language_subset(a, b, cap=100000):
    """Whether L(a) is contained in L(b).

    Runs ``a`` against the subset construction of ``b`` on the fly and looks
    for a reachable pair accepting in ``a`` but not in ``b``.
    """
    symbols = symbols_over(a.guard_props() | b.guard_props())
    start_b = frozenset(b.initial)
    seen = set()
    queue = deque()
    for qa in sorted(a.initial, key=repr):
        node = (qa, start_b)
        seen.add(node)
        queue.append(node)
    subsets = {start_b}
    while queue:
        qa, sb = queue.popleft()
        if qa in a.accepting and not (sb & b.accepting):
            return False
        for sym in symbols:
            targets = a.step(qa, sym)
            if not targets:
                continue
            nb = b.step_set(sb, sym)
            if nb not in subsets:
                subsets.add(nb)
                if len(subsets) > cap:
                    raise DeterminizationLimitError(f"subset construction exceeds {cap} states")
            for qa2 in targets:
                node = (qa2, nb)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
    return True


def concat(first, second):
    """NFA for L(first) . L(second) (epsilon transitions eliminated)."""
    states = [(0, q) for q in first.states] + [(1, q) for q in second.states]
    transitions = [((0, s), g, (0, d)) for s, g, d in first.transitions]
    transitions += [((1, s), g, (1, d)) for s, g, d in second.transitions]
    for s, g, d in second.transitions:
        if s in second.initial:
            for f in first.accepting:
                transitions.append(((0, f), g, (1, d)))
    initial = {(0, q) for q in first.initial}
    if first.initial & first.accepting:
        initial |= {(1, q) for q in second.initial}
    accepting = {(1, q) for q in second.accepting}
    if second.initial & second.accepting:
        accepting |= {(0, q) for q in first.accepting}
    return Nfa(states, initial, accepting, transitions, first.alphabet | second.alphabet)


class DecompositionSet:
    """States of an NFA at which the task splits into order-free parts."""

    def __init__(self, nfa, states):
        self.nfa = nfa
        self.states = frozenset(states)

    def __contains__(self, q):
        return q in self.states

    def __iter__(self):
        return iter(sorted(self.states, key=repr))

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return f"DecompositionSet({sorted(self.states, key=repr)})"


def swap_closed(a, q):
    """Whether every word through ``q`` stays accepted with its halves swapped."""
    pre = a.with_accepting({q})
    post = a.with_initial({q})
    return language_subset(concat(post, pre), a)


def decomposition_set(a):
    states = set(a.initial) | set(a.accepting)
    eligible = reachable(a) & coreachable(a)
    for q in a.states:
        if q in states or q not in eligible:
            continue
        if swap_closed(a, q):
            states.add(q)
    return DecompositionSet(a, states)


def progress_metric(a, q):
    """Longest simple path, in transitions, from an initial state to ``q``."""
    if q in a.initial:
        return 0
    if q not in reachable(a):
        raise ValueError(f"state {q!r} is unreachable")
    succ = {p: sorted(a.successors(p) - {p}, key=repr) for p in a.states}
    best = -1

    def dfs(p, length, on_path):
        nonlocal best
        if p == q:
            best = max(best, length)
            return
        for n in succ[p]:
            if n not in on_path:
                on_path.add(n)
                dfs(n, length + 1, on_path)
                on_path.remove(n)

    for q0 in a.initial:
        dfs(q0, 0, {q0})
    return best


def to_dot(a, decomposition=None, name="nfa"):
    """Graphviz text; decomposition states are filled gray."""
    shaded = set(decomposition.states if isinstance(decomposition, DecompositionSet) else (decomposition or ()))
    ids = {q: f"q{i}" for i, q in enumerate(a.states)}
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle];']
    for q in a.states:
        attrs = []
        if q in a.accepting:
            attrs.append("shape=doublecircle")
        if q in shaded:
            attrs.append('style=filled fillcolor="gray80"')
        label = str(q)
        attrs.append(f'label="{label}"')
        lines.append(f"  {ids[q]} [{' '.join(attrs)}];")
    for i, q in enumerate(sorted(a.initial, key=repr)):
        lines.append(f"  start{i} [shape=point];")
        lines.append(f"  start{i} -> {ids[q]};")
    for s, g, d in a.transitions:
        text = ltlf.render(g.formula).replace('"', '\\"')
        lines.append(f'  {ids[s]} -> {ids[d]} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
