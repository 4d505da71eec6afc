"""Search-based task allocation and planning over hierarchical team models.

The search space is never built.  A search state pairs the active robot and
leaf with the states of every robot and every automaton; successors are
generated on demand and explored with Dijkstra's algorithm.
"""

import heapq
import itertools
import time
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

from .automata import decomposition_set, progress_metric, translate
from .hierarchy import (StateSpecSequence, check_bounded_one_time, infer_temporal_order,
                        predecessors)

MOVE = "move"
SWITCH_IN = "in"
SWITCH_I = "inter1"
SWITCH_II = "inter2"

EMPTY = frozenset()


class PlanningError(RuntimeError):
    pass


class InfeasibleError(PlanningError):
    """The frontier ran dry before the root specification was accepted."""


class PlanningTimeout(PlanningError):
    pass


class StateCapExceeded(PlanningError):
    pass


HEURISTIC_PRESETS = {
    "none": (False, False, False),
    "order": (True, False, False),
    "switch": (False, True, False),
    "guide": (False, False, True),
    "all": (True, True, True),
}


@dataclass
class PlannerOptions:
    temporal_order: bool = True
    essential_switch: bool = True
    automaton_guidance: bool = True
    weight: float = 100.0
    objective: str = "additive"
    omega: float = 0.5
    timeout: float = None
    state_cap: int = None
    translation_cap: int = 10000
    # switch to another leaf on the same robot mid-task (type I switches)
    allow_pause: bool = True

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("weight must be nonnegative")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")
        if self.objective not in ("additive", "minmax"):
            raise ValueError(f"unknown objective {self.objective!r}")

    @classmethod
    def preset(cls, name, **kw):
        order, switch, guide = HEURISTIC_PRESETS[name]
        return cls(temporal_order=order, essential_switch=switch, automaton_guidance=guide, **kw)

    @property
    def guidance_weight(self):
        return self.weight if self.automaton_guidance else 0.0


class SearchState(NamedTuple):
    r: int
    phi: str
    s: tuple
    q: tuple


class Successor(NamedTuple):
    state: SearchState
    cost: float
    kind: str
    step_cost: int


class PlanningContext:
    """Everything the search needs that does not change while it runs."""

    def __init__(self, spec, team, opts=None):
        self.spec = spec
        self.team = list(team)
        self.opts = opts or PlannerOptions()
        if not self.team:
            raise ValueError("the team is empty")
        self.names = list(spec.names)
        self.pos = {n: i for i, n in enumerate(self.names)}
        cap = self.opts.translation_cap
        self.nfa = [translate(spec.formulas[n], cap) for n in self.names]
        self.accepting = [a.accepting for a in self.nfa]
        self.leaves = list(spec.leaves)
        self.chain = {l: [self.pos[p] for p in spec.parents(l)] for l in self.leaves}
        self.singleton = [frozenset({n}) for n in self.names]
        self.decomposition = {}
        self.metric = {}
        for l in self.leaves:
            a = self.nfa[self.pos[l]]
            self.decomposition[l] = frozenset(decomposition_set(a))
            self.metric[l] = {q: _metric_or_zero(a, q) for q in a.states}
        automata = {n: self.nfa[self.pos[n]] for n in self.names}
        one_time = check_bounded_one_time(spec, automata)
        bad = [n for n, ok in one_time.items() if not ok]
        if bad:
            warnings.warn(f"bounded one-time satisfaction fails for {bad}", stacklevel=2)
        self.order = infer_temporal_order(spec, automata)
        self.pred = predecessors(self.order, self.leaves)
        self.essential = essential_states(self.team, self)

    def is_open(self, q, leaf):
        """In-spec progress allowed: the leaf and all its ancestors are unaccepted."""
        i = self.pos[leaf]
        if q[i] in self.accepting[i]:
            return False
        return not any(q[p] in self.accepting[p] for p in self.chain[leaf])

    def satisfied(self, q, leaf):
        return not self.is_open(q, leaf)

    def root_accepted(self, q):
        return q[0] in self.accepting[0]

    def outside_decomposition(self, q):
        return sum(1 for l in self.leaves if q[self.pos[l]] not in self.decomposition[l])

    def guidance(self, q):
        return sum(self.metric[l][q[self.pos[l]]] for l in self.leaves)

    def initial_states(self):
        """Robot 1 on every leaf, all robots and automata at their initial states."""
        s0 = tuple(ts.initial for ts in self.team)
        out = []
        for q0 in itertools.product(*(sorted(a.initial) for a in self.nfa)):
            for l in self.leaves:
                out.append(SearchState(0, l, s0, tuple(q0)))
        return out


def _metric_or_zero(a, q):
    try:
        return progress_metric(a, q)
    except ValueError:
        return 0


def essential_states(team, ctx):
    """Per robot, its initial state plus every state at which some leaf
    automaton can enter a decomposition state it has not visited before.

    Only product states reachable from (any robot state, initial automaton
    state) count, and entering an initial automaton state is never a first
    visit.
    """
    out = []
    memo = {}
    for ts in team:
        key = ts.key if ts.key is not None else id(ts)
        found = memo.get(key)
        if found is None:
            found = set()
            for l in ctx.leaves:
                found |= _triggers(ts, ctx.nfa[ctx.pos[l]], ctx.decomposition[l])
            memo[key] = found
        out.append(frozenset(found | {ts.initial}))
    return out


def _triggers(ts, a, dec):
    wanted = dec - a.initial
    start = [(s, q) for s in range(len(ts)) for q in a.initial]
    seen = set(start)
    stack = list(start)
    found = set()
    while stack:
        s, q = stack.pop()
        targets = a.step(q, ts.labels[s])
        if any(q2 != q and q2 in wanted for q2 in targets):
            found.add(s)
        for s2, _ in ts.succ[s]:
            for q2 in targets:
                if (s2, q2) not in seen:
                    seen.add((s2, q2))
                    stack.append((s2, q2))
    return found


def update_nonleaf(pi, u, parents, ctx):
    """Feed ``pi`` up the chain ``parents`` (positions, nearest first).

    Each parent reads the set of its children that have just been accepted;
    every automaton branch gives one result.
    """
    return [SearchState(u.r, u.phi, u.s, q) for q in _cascade(pi, u.q, parents, ctx)]


def _cascade(pi, q, parents, ctx):
    if not parents:
        return [q]
    p = parents[0]
    out = []
    for q2 in ctx.nfa[p].step(q[p], pi):
        nq = q[:p] + (q2,) + q[p + 1:]
        npi = ctx.singleton[p] if q2 in ctx.accepting[p] else EMPTY
        out.extend(_cascade(npi, nq, parents[1:], ctx))
    return out


def get_successors(v, ctx):
    """Successors of ``v`` as ``Successor(state, cost, kind, step_cost)``.

    ``cost`` is the search cost (robot cost, reweighted when guidance is on);
    ``step_cost`` is the plain robot cost.
    """
    opts = ctx.opts
    out = []
    r, phi, s, q = v
    i = ctx.pos[phi]
    ql = q[i]
    ts = ctx.team[r]
    sr = s[r]
    open_ = ctx.is_open(q, phi)
    dec = ctx.decomposition[phi]
    w = opts.guidance_weight

    if open_:
        targets = ctx.nfa[i].step(ql, ts.labels[sr])
        for q2 in targets:
            pi = ctx.singleton[i] if q2 in ctx.accepting[i] else EMPTY
            nq = q[:i] + (q2,) + q[i + 1:]
            bonus = w * (ctx.metric[phi][q2] - ctx.metric[phi][ql]) if w else 0.0
            for nq2 in _cascade(pi, nq, ctx.chain[phi], ctx):
                for s2, c in ts.succ[sr]:
                    ns = s[:r] + (s2,) + s[r + 1:]
                    out.append(Successor(SearchState(r, phi, ns, nq2), c - bonus, MOVE, c))

    if ql not in dec:
        return out
    ess = ctx.essential if opts.essential_switch else None
    if ess is not None and sr not in ess[r]:
        return out

    if open_ and r + 1 < len(ctx.team):
        if ess is None or s[r + 1] in ess[r + 1]:
            out.append(Successor(SearchState(r + 1, phi, s, q), 0, SWITCH_IN, 0))

    accepted = ql in ctx.accepting[i]
    if opts.temporal_order:
        unsatisfied = {l for l in ctx.leaves if ctx.is_open(q, l)}
    for other in ctx.leaves:
        if other == phi or q[ctx.pos[other]] not in ctx.decomposition[other]:
            continue
        if opts.temporal_order:
            if other not in unsatisfied:
                continue
            if any(p in unsatisfied for p in ctx.pred[other] if p != phi):
                continue
        if opts.allow_pause:
            out.append(Successor(SearchState(r, other, s, q), 0, SWITCH_I, 0))
        if accepted and (r != 0 or not opts.allow_pause) and (ess is None or s[0] in ess[0]):
            out.append(Successor(SearchState(0, other, s, q), 0, SWITCH_II, 0))
    return out


@dataclass
class Segment:
    leaf: str
    start: int
    end: int
    robots: tuple


@dataclass
class PlanResult:
    tau: StateSpecSequence
    segments: list
    robot_costs: list
    cost: float
    objective: float
    explored: int
    elapsed: float
    path: list = field(repr=False, default_factory=list)
    kinds: list = field(repr=False, default_factory=list)
    search_cost: float = 0.0
    monotone: bool = True


def plan(spec, team, opts=None, ctx=None):
    """Dijkstra over the implicit hierarchical team model.

    Raises InfeasibleError, PlanningTimeout or StateCapExceeded.
    """
    ctx = ctx or PlanningContext(spec, team, opts)
    opts = ctx.opts
    t0 = time.perf_counter()
    deadline = t0 + opts.timeout if opts.timeout else None
    counter = itertools.count()
    heap = []
    # state -> (search cost, predecessor, edge kind, robot cost of the edge)
    info = {}
    for v in ctx.initial_states():
        if v not in info:
            info[v] = (0.0, None, None, 0)
            heapq.heappush(heap, (0.0, next(counter), v))
    explored = set()
    last = float("-inf")
    monotone = True
    while heap:
        g, _, v = heapq.heappop(heap)
        if v in explored or g > info[v][0]:
            continue
        explored.add(v)
        if g < last:
            monotone = False
        last = g
        if deadline is not None and len(explored) % 256 == 0 and time.perf_counter() > deadline:
            raise PlanningTimeout(f"no plan within {opts.timeout} s ({len(explored)} states explored)")
        if opts.state_cap is not None and len(explored) > opts.state_cap:
            raise StateCapExceeded(f"explored more than {opts.state_cap} states")
        assert ctx.outside_decomposition(v.q) <= 1, "more than one leaf outside its decomposition set"
        if ctx.root_accepted(v.q):
            path, kinds = _trace(info, v)
            result = extract_plan(path, kinds, ctx)
            result.explored = len(explored)
            result.elapsed = time.perf_counter() - t0
            result.search_cost = g
            result.monotone = monotone
            return result
        for u, cost, kind, step in get_successors(v, ctx):
            if u in explored:
                continue
            ng = g + cost
            old = info.get(u)
            if old is None or ng < old[0]:
                info[u] = (ng, v, kind, step)
                heapq.heappush(heap, (ng, next(counter), u))
    raise InfeasibleError(f"no plan exists ({len(explored)} states explored)")


def _trace(info, v):
    path, kinds = [v], []
    while True:
        _, prev, kind, _ = info[path[-1]]
        if prev is None:
            break
        path.append(prev)
        kinds.append(kind)
    path.reverse()
    kinds.reverse()
    return path, kinds


def extract_plan(path, kinds, ctx):
    """Turn a searched path into a timed state-specification sequence.

    The path is cut at every inter-spec switch.  Within a segment the robots
    that moved act in parallel; each is assigned the leaf at the instants whose
    label it fed to the leaf automaton and idles afterwards.
    """
    if not path or not ctx.root_accepted(path[-1].q):
        raise ValueError("path does not end in a root-accepting state")
    n = len(ctx.team)
    chunks = [[path[0].phi, [[] for _ in range(n)]]]
    for v, kind, u in zip(path, kinds, path[1:]):
        if kind in (SWITCH_I, SWITCH_II):
            chunks.append([u.phi, [[] for _ in range(n)]])
        elif kind == MOVE:
            chunks[-1][1][v.r].append((v.s[v.r], u.s[v.r]))
    current = list(path[0].s)
    rows, segments = [], []
    for leaf, moves in chunks:
        horizon = max(len(m) for m in moves)
        if horizon == 0:
            continue
        start = len(rows)
        for t in range(horizon):
            row = []
            for r in range(n):
                if t < len(moves[r]):
                    row.append((moves[r][t][0], leaf))
                elif moves[r]:
                    row.append((moves[r][-1][1], None))
                else:
                    row.append((current[r], None))
            rows.append(row)
        for r in range(n):
            if moves[r]:
                current[r] = moves[r][-1][1]
        robots = tuple(r for r in range(n) if moves[r])
        segments.append(Segment(leaf, start, len(rows) - 1, robots))
    rows.append([(current[r], None) for r in range(n)])
    team = ctx.team
    tau = StateSpecSequence([[(team[r].states[s], psi) for r, (s, psi) in enumerate(row)] for row in rows])
    costs = robot_costs(tau, team)
    return PlanResult(tau, segments, costs, sum(costs),
                      objective(tau, team, ctx.opts.objective, ctx.opts.omega),
                      0, 0.0, path, kinds)


def robot_costs(tau, team):
    out = []
    for r, ts in enumerate(team):
        trace = [ts.index[st] for st in tau.trace(r)]
        out.append(sum(ts.cost(a, b) for a, b in zip(trace, trace[1:]) if a != b))
    return out


def objective(tau, team, mode="additive", omega=0.5):
    """Additive cost, or ``omega * max + (1 - omega) * sum`` for minmax."""
    costs = robot_costs(tau, team)
    if not costs:
        return 0
    if mode == "additive":
        return sum(costs)
    if mode == "minmax":
        return omega * max(costs) + (1 - omega) * sum(costs)
    raise ValueError(f"unknown objective {mode!r}")


def labelers(team):
    """Per-robot labeling functions over native robot states."""
    return [lambda st, ts=ts: ts.labels[ts.index[st]] for ts in team]


def count_team_model_transitions(spec, team, opts=None, ctx=None):
    """Transition counts of the hierarchical team models and their bounds.

    Switch counts use the static part of the heuristic filters: essential
    endpoints when the switch heuristic is on, and no switch into a leaf that
    must precede the current one when the order heuristic is on.
    """
    ctx = ctx or PlanningContext(spec, team, opts)
    opts = ctx.opts
    n = len(team)
    size = [len(ts) for ts in team]
    full = [len(ts) for ts in team]
    if opts.essential_switch:
        size = [len(e) for e in ctx.essential]
    product = {}
    for l in ctx.leaves:
        a = ctx.nfa[ctx.pos[l]]
        for r, ts in enumerate(team):
            total = 0
            for s in range(len(ts)):
                succ = len(ts.succ[s])
                for q in a.states:
                    total += succ * len(a.step(q, ts.labels[s]))
            nq = len(a.states)
            product[(r, l)] = (total, (nq * full[r]) ** 2)
    Q = {l: len(ctx.nfa[ctx.pos[l]].states) for l in ctx.leaves}
    D = {l: len(ctx.decomposition[l]) for l in ctx.leaves}
    F = {l: len(ctx.accepting[ctx.pos[l]]) for l in ctx.leaves}

    def allowed(a, b):
        return not (opts.temporal_order and b in ctx.pred[a])

    zin = sum(D[l] * size[r] * size[r + 1] for l in ctx.leaves for r in range(n - 1))
    zin_bound = sum(D[l] * full[r] * D[l] * full[r + 1] for l in ctx.leaves for r in range(n - 1))
    pairs = [(a, b) for a in ctx.leaves for b in ctx.leaves if a != b]
    z1 = sum(D[a] * D[b] * size[r] for a, b in pairs if allowed(a, b) for r in range(n))
    z2 = sum(F[a] * size[r] * D[b] * (1 if r == 0 else size[0])
             for a, b in pairs if allowed(a, b) for r in range(n))

    def bound(S):
        b1 = sum(D[a] * S[r] * D[b] * S[r] for a, b in pairs for r in range(n))
        b2 = sum(F[a] * S[r] * D[b] * S[0] for a, b in pairs for r in range(n))
        return b1, b2

    b1, b2 = bound(full)
    stats = {
        "product": product,
        "in": (zin, zin_bound),
        "inter1": (z1, b1),
        "inter2": (z2, b2),
    }
    if opts.essential_switch:
        c1, c2 = bound(size)
        cin = sum(D[l] * size[r] * D[l] * size[r + 1] for l in ctx.leaves for r in range(n - 1))
        stats["essential_bounds"] = {"in": cin, "inter1": c1, "inter2": c2}
    return stats
