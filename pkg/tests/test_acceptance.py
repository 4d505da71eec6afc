"""Acceptance criteria 1-10; each test prints one PASS/FAIL line."""

import json
import random
import time
import warnings

import conftest
from hltlf.automata import Guard, Nfa, accepts, decomposition_set, is_empty, translate
from hltlf.cli import main
from hltlf.hierarchy import StateSpecSequence, load_spec, output_words, satisfies
from hltlf.ltlf import And, evaluate, parse_formula, propositions
from hltlf.planner import (InfeasibleError, PlannerOptions, count_team_model_transitions, labelers,
                           plan)
from hltlf.scenario import load_scenario
from hltlf.world import PLAIN, RobotConfig, build_ts, bundled, load_map

from oracles import (all_words, corpus, plain_labelers, random_miniature, segmented_optimum,
                     swap_closed_brute, symbols)

warnings.simplefilter("ignore")


def record(n, ok, detail):
    conftest.VERDICTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_output_word_markings():
    t0 = time.perf_counter()
    spec = load_spec(bundled("specs/pickplace.hltlf"))
    labels = [set(), {"s_a"}, {"t_a"}, {"s_b"}, set(), {"t_b"}, set(), {"s_c"}, {"t_c"}]
    assigned = ["fetch_a"] * 3 + ["fetch_b"] * 3 + ["fetch_c"] * 3
    tau = StateSpecSequence([[(i, psi)] for i, psi in enumerate(assigned)])
    out = output_words(tau, spec, [dict(enumerate(frozenset(x) for x in labels))])
    got = {n: [i for i, m in enumerate(w) if m] for n, w in out.items()}
    want = {"fetch_a": [2], "fetch_b": [5], "fetch_c": [8], "task": [8]}
    dt = time.perf_counter() - t0
    record(1, got == want and dt < 1.0, f"marks {got}, {dt:.2f} s")


def _words_for(props, rng):
    """Every word up to length 4 when that is at most 65536 words; otherwise
    every word up to the longest length that fits, plus 2000 seeded words
    of length 4."""
    props = sorted(props) or ["a"]
    k = len(props)
    if (2 ** k) ** 4 <= 65536:
        return list(all_words(props, 4))
    length = 1
    while (2 ** k) ** (length + 1) <= 65536:
        length += 1
    words = list(all_words(props, length))
    alphabet = symbols(props)
    words += [[rng.choice(alphabet) for _ in range(4)] for _ in range(2000)]
    return words


def test_criterion_02_translation_correctness():
    t0 = time.perf_counter()
    rng = random.Random(2)
    items = corpus()
    checked = bad = 0
    for f in items:
        a = translate(f)
        for w in _words_for(propositions(f), rng):
            checked += 1
            if accepts(a, w) != evaluate(f, w, 0):
                bad += 1
    dt = time.perf_counter() - t0
    ok = len(items) >= 20 and bad == 0 and dt < 60
    record(2, ok, f"{len(items)} formulas, {checked} words, {bad} disagreements, {dt:.1f} s")


def _two_goal_nfa():
    g = lambda t: Guard.from_formula(parse_formula(t))
    t = [(0, g("!a && !b"), 0), (0, g("a && !b"), 1), (0, g("b && !a"), 2), (0, g("a && b"), 3),
         (1, g("!b"), 1), (1, g("b"), 3), (2, g("!a"), 2), (2, g("a"), 3), (3, g("true"), 3)]
    return Nfa(range(4), {0}, {3}, t, {"a", "b"})


def test_criterion_03_decomposition_sets():
    t0 = time.perf_counter()
    nfa = _two_goal_nfa()
    d = set(decomposition_set(nfa))
    nfa_ok = {1, 2} <= d and set(nfa.initial) | set(nfa.accepting) <= d
    checked = bad = 0
    for f in corpus():
        a = translate(f)
        if len(a.states) > 8:
            continue
        dset = decomposition_set(a)
        for q in a.states:
            # initial and accepting states are members by default, not by swapping
            if q in a.initial or q in a.accepting:
                if q not in dset:
                    bad += 1
                continue
            checked += 1
            if (q in dset) != swap_closed_brute(a, q):
                bad += 1
    dt = time.perf_counter() - t0
    record(3, nfa_ok and bad == 0 and dt < 120,
           f"two_goal_nfa set {sorted(d)}, {checked} states cross-checked, {bad} mismatches, {dt:.1f} s")


PRESETS = ["none", "order", "switch", "guide", "all"]


def test_criterion_04_planner_soundness():
    t0 = time.perf_counter()
    plans = bad = errors = 0
    for seed in range(200):
        grid, spec, team, starts = random_miniature(1000 + seed)
        opts = PlannerOptions.preset(PRESETS[seed % len(PRESETS)])
        try:
            res = plan(spec, team, opts)
        except InfeasibleError:
            # a heuristic may only give up when no segmented plan exists either
            if segmented_optimum(spec, grid, starts, 8) is not None and opts.temporal_order is False \
                    and opts.essential_switch is False:
                errors += 1
            continue
        except Exception:
            errors += 1
            continue
        plans += 1
        if not satisfies(res.tau, spec, plain_labelers(grid, len(team))):
            bad += 1
    dt = time.perf_counter() - t0
    record(4, bad == 0 and errors == 0 and plans > 150 and dt < 600,
           f"{plans} plans, {bad} rejected by the oracle, {errors} errors, {dt:.1f} s")


def test_criterion_05_optimality_and_completeness():
    t0 = time.perf_counter()
    n = 150
    exact = bounded = found = 0
    notes = []
    for seed in range(n):
        grid, spec, team, starts = random_miniature(seed)
        oracle = segmented_optimum(spec, grid, starts, 8)
        best = oracle[0] if oracle else None
        try:
            seg = plan(spec, team, PlannerOptions.preset("none", weight=0.0, allow_pause=False)).cost
        except InfeasibleError:
            seg = None
        try:
            free = plan(spec, team, PlannerOptions.preset("none", weight=0.0)).cost
        except InfeasibleError:
            free = None
        if seg == best:
            exact += 1
        else:
            notes.append(f"seed {seed}: {seg} vs {best}")
        if best is None or (free is not None and free <= best):
            bounded += 1
        if best is not None and seg is not None:
            found += 1
    dt = time.perf_counter() - t0
    record(5, exact == n and bounded == n and dt < 900,
           f"{exact}/{n} exact, {bounded}/{n} within bound with pauses, {found} feasible, {dt:.1f} s"
           + (f"; {notes[:3]}" if notes else ""))


def test_criterion_06_expressiveness():
    spec = load_spec(bundled("specs/expressiveness.hltlf"))
    flat = And(spec.formulas["first"], spec.formulas["second"])
    empty = is_empty(translate(flat))
    tau = StateSpecSequence([[(0, "first"), (0, "second")]])
    sat = satisfies(tau, spec, [{0: {"a"}}, {0: {"b"}}])
    record(6, empty and sat, f"flat language empty: {empty}, hierarchical 1-step plan satisfies: {sat}")


def test_criterion_07_complexity_bounds():
    grid = load_map(bundled("pickplace.map"))
    spec = load_spec(bundled("specs/pickplace.hltlf"))
    team = [build_ts(grid, RobotConfig(c, PLAIN, name=str(i + 1)))
            for i, c in enumerate([grid.starts["1"], grid.starts["2"]])]
    ok = True
    parts = []
    for preset in ("none", "switch"):
        stats = count_team_model_transitions(spec, team, PlannerOptions.preset(preset))
        for count, bound in stats["product"].values():
            ok &= count <= bound
        for kind in ("in", "inter1", "inter2"):
            count, bound = stats[kind]
            ok &= count <= bound
            if preset == "switch":
                ok &= count <= stats["essential_bounds"][kind]
            parts.append(f"{preset}:{kind} {count}/{stats['essential_bounds'][kind] if preset == 'switch' else bound}")
    record(7, ok, ", ".join(parts))


def test_criterion_08_heuristic_effect():
    sc = load_scenario("scenario1")
    grid, spec, team, _ = sc.build()
    fast = plan(spec, team, sc.options(heuristics="all"))
    slow = plan(spec, team, sc.options(heuristics="none"))
    speed = fast.elapsed / slow.elapsed
    ratio = fast.cost / slow.cost
    ok = speed <= 0.2 and ratio <= 1.35 and fast.elapsed < 60
    ok &= satisfies(fast.tau, spec, labelers(team)) and satisfies(slow.tau, spec, labelers(team))
    record(8, ok, f"time {fast.elapsed:.2f} s vs {slow.elapsed:.2f} s (x{speed:.3f}), "
                  f"cost {fast.cost} vs {slow.cost} (x{ratio:.2f})")


def test_criterion_09_scalability():
    sc = load_scenario("scenario123_r10")
    grid, spec, team, _ = sc.build()
    t0 = time.perf_counter()
    res = plan(spec, team, sc.options(heuristics="all", timeout=600))
    dt = time.perf_counter() - t0
    valid = satisfies(res.tau, spec, labelers(team))
    record(9, valid and dt < 600 and len(team) == 10,
           f"10 robots, cost {res.cost}, {res.explored} states, {dt:.1f} s, valid {valid}")


def test_criterion_10_determinism(capsys):
    outs = []
    for _ in range(2):
        code = main(["plan", "--scenario", "scenario1", "--seed", "7", "--starts", "random", "--deterministic"])
        outs.append((code, capsys.readouterr().out))
    same = outs[0] == outs[1] and outs[0][0] == 0 and json.loads(outs[0][1])["valid"]
    with capsys.disabled():
        record(10, same, f"{len(outs[0][1])} bytes, identical: {outs[0][1] == outs[1][1]}")
