"""Brute-force reference implementations used by the tests.

Nothing here calls the planner or the automata decomposition code; each
oracle enumerates words, plans or product paths directly.
"""

import heapq
import itertools
import random

from hypothesis import strategies as st

from hltlf import ltlf
from hltlf.automata import accepts
from hltlf.hierarchy import load_spec, parse_spec
from hltlf.world import PLAIN, GridMap, RobotConfig, build_ts, bundled

# ---------------------------------------------------------------------------
# words and formulas


def symbols(props):
    props = sorted(props)
    return [frozenset(c) for k in range(len(props) + 1) for c in itertools.combinations(props, k)]


def all_words(props, max_len, min_len=1):
    alphabet = symbols(props)
    for n in range(min_len, max_len + 1):
        yield from (list(w) for w in itertools.product(alphabet, repeat=n))


SCENARIO_SPECS = ["pickplace", "pickplace_three_level", "scenario1", "scenario2", "scenario3", "expressiveness"]


def scenario_leaves():
    out = []
    for name in SCENARIO_SPECS:
        spec = load_spec(bundled(f"specs/{name}.hltlf"))
        out.extend(spec.formulas[l] for l in spec.leaves)
    return out


def scenario_formulas():
    out = []
    for name in SCENARIO_SPECS:
        spec = load_spec(bundled(f"specs/{name}.hltlf"))
        out.extend(spec.formulas[n] for n in spec.names)
    return out


SYNTHETIC = [
    "true", "false", "a", "!a", "X a", "X X a", "F a", "G a", "a U b", "F a && F b",
    "F (a && F b)", "F (a && X b)", "G (a -> F b)", "!a U b", "a U (b && !a)", "F G a",
    "G F a", "a U G b", "X !a", "!X a", "F a || G b", "(a U b) U c", "G (a -> X b)",
    "F (a && F (b && F c))", "G !c && F a", "a -> X (b U c)", "!(F a && F b)",
    "F a && G !b", "X (a || b) && F c", "G (a || b || c)",
]


def corpus():
    """Scenario leaves plus synthetic formulas, as parsed formulas."""
    return scenario_leaves() + [ltlf.parse_formula(t) for t in SYNTHETIC]


def formulas(props=("a", "b", "c"), max_depth=3):
    """Hypothesis strategy for formulas of bounded depth."""
    leaves = st.sampled_from([ltlf.Prop(p) for p in props] + [ltlf.TRUE, ltlf.FALSE])

    def extend(children):
        unary = st.sampled_from([ltlf.Not, ltlf.Next, ltlf.Eventually, ltlf.Always])
        binary = st.sampled_from([ltlf.And, ltlf.Or, ltlf.Implies, ltlf.Until])
        return st.one_of(
            st.builds(lambda f, a: f(a), unary, children),
            st.builds(lambda f, a, b: f(a, b), binary, children, children),
        )

    return st.recursive(leaves, extend, max_leaves=2 ** max_depth).filter(
        lambda f: ltlf.depth(f) <= max_depth)


def words_strategy(props=("a", "b", "c"), min_size=1, max_size=5):
    sym = st.frozensets(st.sampled_from(props))
    return st.lists(sym, min_size=min_size, max_size=max_size)


# ---------------------------------------------------------------------------
# automata


def runs_to(a, word):
    """States reachable from the initial states after reading ``word``."""
    cur = set(a.initial)
    for s in word:
        cur = set(a.step_set(cur, s))
    return cur


def symbol_classes(a):
    """One symbol per class of symbols that satisfy exactly the same guards.

    Runs of ``a`` cannot tell symbols of one class apart, so word checks over
    the representatives are exhaustive.
    """
    guards = sorted({g for _, g, _ in a.transitions}, key=repr)
    reps = {}
    for sym in symbols(a.guard_props()):
        reps.setdefault(tuple(g.holds(sym) for g in guards), sym)
    return list(reps.values())


def swap_closed_brute(a, q, max_len=3):
    """Every sigma1 (initial to q) and sigma2 (q to accepting) give an accepted sigma2 sigma1."""
    alphabet = symbol_classes(a)
    words = [list(w) for n in range(max_len + 1) for w in itertools.product(alphabet, repeat=n)]
    firsts = [w for w in words if q in runs_to(a, w)]
    from_q = a.with_initial(frozenset({q}))
    seconds = [w for w in words if accepts(from_q, w)]
    return all(accepts(a, w2 + w1) for w1 in firsts for w2 in seconds)


def longest_simple_path(a, q):
    """Longest repetition-free path length from an initial state to ``q``."""
    best = -1
    for q0 in a.initial:
        stack = [(q0, (q0,))]
        while stack:
            p, path = stack.pop()
            if p == q:
                best = max(best, len(path) - 1)
            for p2 in a.successors(p):
                if p2 not in path:
                    stack.append((p2, path + (p2,)))
    return best


# ---------------------------------------------------------------------------
# single-robot product search by formula progression


def shortest_accepting_cost(ts, f):
    """Cheapest TS path whose label word satisfies ``f`` (labels of states left).

    Uses progression only, so it is independent of the automata module.
    """
    start = (ts.initial, f)
    best = {start: 0}
    heap = [(0, 0, start)]
    tick = itertools.count(1)
    while heap:
        g, _, (s, res) = heapq.heappop(heap)
        if g > best[(s, res)]:
            continue
        res2 = ltlf.progress(res, ts.labels[s])
        if res2 == ltlf.FALSE:
            continue
        if ltlf.holds_on_empty(res2):
            return g
        for s2, c in ts.succ[s]:
            node = (s2, res2)
            if g + c < best.get(node, float("inf")):
                best[node] = g + c
                heapq.heappush(heap, (g + c, next(tick), node))
    return None


# ---------------------------------------------------------------------------
# segmented plans checked against the output-word semantics


def _advance(spec, residuals, leaf_symbols):
    """Feed one instant through the hierarchy, bottom-up with reset on marks.

    Returns the new residual tuple and the set of marked names.
    """
    names = spec.names
    index = {n: i for i, n in enumerate(names)}
    res = list(residuals)
    marked = set()
    for n in _post_order(spec):
        if n in spec.leaves:
            sym = leaf_symbols.get(n, frozenset())
        else:
            sym = frozenset(c for c in spec.children[n] if c in marked)
        r = ltlf.progress(res[index[n]], sym)
        if ltlf.holds_on_empty(r):
            marked.add(n)
            r = spec.formulas[n]
        res[index[n]] = r
    return tuple(res), marked


def _post_order(spec):
    out = []

    def visit(n):
        for c in spec.children[n]:
            visit(c)
        out.append(n)

    visit(spec.root)
    return out


class _Effects:
    """Words over a leaf abstracted by their effect on its progression residuals.

    The effect of a word maps each residual reachable from the leaf formula to
    the residual left after reading the word, so concatenation is composition.
    """

    def __init__(self, f):
        self.f = f
        props = sorted(ltlf.propositions(f))
        self.props = frozenset(props)
        seen = {f: 0}
        order = [f]
        k = 0
        while k < len(order):
            g = order[k]
            k += 1
            for sym in symbols(props):
                h = ltlf.progress(g, sym)
                if h not in seen:
                    seen[h] = len(order)
                    order.append(h)
        self.residuals = order
        self.index = seen
        self.identity = tuple(range(len(order)))
        self._step = {}

    def extend(self, effect, label):
        sym = frozenset(label) & self.props
        key = (effect, sym)
        got = self._step.get(key)
        if got is None:
            got = tuple(self.index[ltlf.progress(self.residuals[i], sym)] for i in effect)
            self._step[key] = got
        return got

    def accepts(self, effects):
        """Every concatenation order of the non-empty words satisfies the leaf."""
        parts = [e for e in effects if e is not None]
        if not parts:
            return False
        for perm in itertools.permutations(parts):
            i = 0
            for e in perm:
                i = e[i]
            if not ltlf.holds_on_empty(self.residuals[i]):
                return False
        return True


def segmented_optimum(spec, grid, starts, max_horizon=8):
    """Least total move cost over segmented state-specification sequences.

    A sequence has at most ``max_horizon + 1`` instants and is cut into
    segments, one per distinct leaf.  Within a segment each robot serves the
    leaf from the segment's first instant for a while and then idles in
    place for the rest of it; only serving robots move.  The robots' parts
    of a segment must satisfy the leaf in any concatenation order, and the
    whole sequence must satisfy the output-word semantics, evaluated by
    progression with a reset after every mark.  Returns ``(cost, rows)`` or
    None.  Robots use the plain profile: labels are region names only.
    """
    n = len(starts)
    leaves = list(spec.leaves)
    effects = {l: _Effects(spec.formulas[l]) for l in leaves}
    f0 = tuple(spec.formulas[x] for x in spec.names)
    none = (None,) * n
    start = (tuple(starts), None, frozenset(), f0, 0, (True,) * n, none)
    best = {start: 0}
    parent = {start: None}
    tick = itertools.count()
    heap = [(0, next(tick), start)]
    nbr = {c: [c] + list(grid.neighbours(c)) for c in grid.free_cells()}
    advance = {}
    while heap:
        g, _, node = heapq.heappop(heap)
        if node[0] == "goal":
            rows = []
            while parent[node] is not None:
                node, row = parent[node]
                rows.append(row)
            return g, rows[::-1]
        if g > best[node]:
            continue
        cells, seg, used, res, t, active, words = node
        options = [(seg, active, words)] if seg is not None else []
        if seg is None or effects[seg].accepts(words):
            options += [(l, (True,) * n, none) for l in leaves if l not in used]
        for leaf, act, wds in options:
            eff = effects[leaf]
            used2 = used | {leaf}
            choices = [(True, False) if a else (False,) for a in act]
            for mask in itertools.product(*choices):
                sym = frozenset().union(*(grid.labels_at(cells[r]) for r in range(n) if mask[r]))
                key = (res, leaf, sym)
                if key not in advance:
                    advance[key] = _advance(spec, res, {leaf: sym})
                res2, marked = advance[key]
                wds2 = tuple(eff.extend(eff.identity if w is None else w, grid.labels_at(cells[r]))
                             if mask[r] else w for r, w in enumerate(wds))
                row = tuple((cells[r], leaf if mask[r] else None) for r in range(n))
                if spec.root in marked and eff.accepts(wds2):
                    goal = ("goal", t, cells, leaf, mask)
                    if g < best.get(goal, float("inf")):
                        best[goal] = g
                        parent[goal] = (node, row)
                        heapq.heappush(heap, (g, next(tick), goal))
                    continue
                if t + 1 > max_horizon:
                    continue
                steps = [nbr[c] if mask[r] else [c] for r, c in enumerate(cells)]
                for nxt in itertools.product(*steps):
                    cost = g + sum(1 for a, b in zip(cells, nxt) if a != b)
                    child = (nxt, leaf, used2, res2, t + 1, mask, wds2)
                    if cost < best.get(child, float("inf")):
                        best[child] = cost
                        parent[child] = (node, row)
                        heapq.heappush(heap, (cost, next(tick), child))
    return None


# ---------------------------------------------------------------------------
# random miniature scenarios

# leaf templates over a, b, c; every one needs some proposition to become true
LEAF_TEMPLATES = [
    "F a", "F b", "F c", "F a && F b", "F b && F c", "F a || F c", "G !c && F a",
    "G !a && F b", "!b U a", "F (a && F b)", "F (c && F a)", "F a && G !b",
]
# root templates over leaf names x and y
ROOT_TEMPLATES_2 = ["F x && F y", "F (x && F y)", "F x || F y", "F (y && F x)"]
ROOT_TEMPLATES_1 = ["F x"]


def miniature_spec(root, leaves):
    """Two-level spec text; ``leaves`` maps leaf name to formula text."""
    lines = ["hltlf v1", "alphabet: a b c", "level 1:", f"  task = {root}", "level 2:"]
    lines += [f"  {k} = {v}" for k, v in leaves.items()]
    return parse_spec("\n".join(lines) + "\n")


def random_grid(rng, width=3, height=3, max_obstacles=1):
    cells = [(x, y) for y in range(height) for x in range(width)]
    while True:
        obstacles = frozenset(rng.sample(cells, rng.randint(0, max_obstacles)))
        free = [c for c in cells if c not in obstacles]
        if _connected(free):
            break
    regions = {}
    for p in ("a", "b", "c"):
        regions[p] = frozenset(rng.sample(free, rng.randint(1, 2)))
    return GridMap(width, height, obstacles, regions)


def _connected(free):
    if not free:
        return False
    seen = {free[0]}
    stack = [free[0]]
    fs = set(free)
    while stack:
        x, y = stack.pop()
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in fs and n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(fs)


def random_miniature(seed, max_robots=2, width=3, height=3, templates=LEAF_TEMPLATES):
    """Seeded random (grid, spec, team) on a small grid with 1 or 2 leaves."""
    rng = random.Random(seed)
    grid = random_grid(rng, width, height)
    n_leaves = rng.randint(1, 2)
    if n_leaves == 1:
        spec = miniature_spec(rng.choice(ROOT_TEMPLATES_1), {"x": rng.choice(templates)})
    else:
        spec = miniature_spec(rng.choice(ROOT_TEMPLATES_2),
                              {"x": rng.choice(templates), "y": rng.choice(templates)})
    n = rng.randint(1, max_robots)
    starts = rng.sample(grid.free_cells(), n)
    team = [build_ts(grid, RobotConfig(c, PLAIN, name=str(i + 1))) for i, c in enumerate(starts)]
    return grid, spec, team, starts


def plain_labelers(grid, n):
    return [lambda st: grid.labels_at(st[0])] * n


