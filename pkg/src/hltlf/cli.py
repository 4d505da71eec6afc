"""Command line: plan, validate, bench and render."""

import argparse
import json
import os
import statistics
import sys
import time

from . import render as views
from .hierarchy import SpecError, StateSpecSequence, load_spec, output_words, satisfies
from .planner import (HEURISTIC_PRESETS, InfeasibleError, PlanningContext, PlanningTimeout,
                      StateCapExceeded, plan)
from .scenario import Scenario, ScenarioError, load_scenario
from .world import MapError, bundled, load_map, load_profiles

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_TIMEOUT = 3
EXIT_CAP = 4


class CliError(Exception):
    pass


def _find(path, folder):
    """Accept a path, or a file name shipped with the package."""
    if path is None or os.path.exists(path):
        return path
    for name in (path, path + ".hltlf", path + ".map"):
        candidate = bundled(os.path.join(folder, name)) if folder else bundled(name)
        if os.path.exists(candidate):
            return candidate
    raise CliError(f"file not found: {path}")


def _parse_starts(text):
    if text in (None, "map", "random"):
        return text
    try:
        return [tuple(int(v) for v in part.split(",")) for part in text.split(";") if part]
    except ValueError:
        raise CliError(f"bad --starts value {text!r}; use 'x,y;x,y', 'map' or 'random'") from None


def scenario_from_args(args):
    """Scenario from --scenario, overridden by the individual flags."""
    if args.scenario:
        sc = load_scenario(args.scenario)
    else:
        if not args.spec or not args.map:
            raise CliError("give --scenario, or both --spec and --map")
        sc = Scenario(name=os.path.splitext(os.path.basename(args.spec))[0],
                      map_path=_find(args.map, ""), spec_path=_find(args.spec, "specs"),
                      profile="office", robots=2, starts="map", seed=0)
    if args.spec and args.scenario:
        sc.spec_path = _find(args.spec, "specs")
    if args.map and args.scenario:
        sc.map_path = _find(args.map, "")
    if getattr(args, "profile", None):
        sc.profile = args.profile
    starts = _parse_starts(getattr(args, "starts", None))
    if args.robots is not None:
        sc.robots = args.robots
        if starts is None and isinstance(sc.starts, list) and len(sc.starts) != sc.robots:
            sc.starts = "random"
    if starts is not None:
        sc.starts = starts
    if args.seed is not None:
        sc.seed = args.seed
    if sc.starts == "map" and not args.scenario:
        grid = load_map(sc.map_path)
        if len(grid.starts) < sc.robots:
            sc.starts = "random"
    if isinstance(sc.starts, list) and len(sc.starts) != sc.robots:
        raise CliError(f"{len(sc.starts)} starts given for {sc.robots} robots")
    return sc


def _options(sc, args, heuristics=None):
    over = {
        "heuristics": heuristics or getattr(args, "heuristics", None),
        "weight": getattr(args, "weight", None),
        "objective": getattr(args, "objective", None),
        "omega": getattr(args, "omega", None),
        "timeout": getattr(args, "timeout", None),
    }
    return sc.options(**over)


def plan_document(sc, team, result, opts, deterministic=False, valid=None):
    """Plan as a JSON-ready dict with a schema version."""
    names = [ts.name for ts in team]
    rows = []
    for row in result.tau.rows:
        rows.append([{"cell": list(st[0]), "status": st[1], "assigned": psi} for st, psi in row])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "hltlf-plan",
        "scenario": sc.name,
        "sources": {"spec": sc.spec_path, "map": sc.map_path, "profile": sc.profile,
                    "profiles": sc.profiles_path},
        "seed": sc.seed,
        "options": {"heuristics": [k for k, on in (("order", opts.temporal_order),
                                                  ("switch", opts.essential_switch),
                                                  ("guide", opts.automaton_guidance)) if on],
                    "weight": opts.weight, "objective": opts.objective, "omega": opts.omega},
        "robots": [{"name": n, "start": list(ts.states[ts.initial][0])} for n, ts in zip(names, team)],
        "horizon": len(rows) - 1,
        "rows": rows,
        "segments": [{"leaf": s.leaf, "start": s.start, "end": s.end,
                      "robots": [names[r] for r in s.robots]} for s in result.segments],
        "robot_costs": list(result.robot_costs),
        "cost": result.cost,
        "objective": {"mode": opts.objective, "omega": opts.omega, "value": result.objective},
        "explored": result.explored,
        "valid": valid,
    }
    if not deterministic:
        doc["wall_clock_s"] = round(result.elapsed, 4)
    return doc


def plan_text(doc, leaves):
    lines = [f"scenario {doc['scenario']}: cost {doc['cost']}, objective "
             f"{doc['objective']['mode']} = {doc['objective']['value']:g}, "
             f"{doc['explored']} states explored, valid={doc['valid']}"]
    for seg in doc["segments"]:
        lines.append(f"  segment {seg['leaf']}: t={seg['start']}..{seg['end']} robots {','.join(seg['robots'])}")
    rows = [[(c["cell"], c["status"], c["assigned"]) for c in row] for row in doc["rows"]]
    lines.append(views.timeline_text(rows, leaves).rstrip())
    for t, row in enumerate(doc["rows"]):
        cells = "  ".join(f"{c['cell'][0]},{c['cell'][1]}:{c['status']}:{c['assigned'] or 'ε'}" for c in row)
        lines.append(f"  t={t:3d}  {cells}")
    return "\n".join(lines) + "\n"


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_plan(args):
    sc = scenario_from_args(args)
    grid, spec, team, profile = sc.build()
    opts = _options(sc, args)
    try:
        result = plan(spec, team, opts)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PlanningTimeout as e:
        print(f"timeout: {e}", file=sys.stderr)
        return EXIT_TIMEOUT
    except StateCapExceeded as e:
        print(f"state cap: {e}", file=sys.stderr)
        return EXIT_CAP
    labelers = [lambda st: grid.labels_at(tuple(st[0])) | profile.statuses[st[1]]] * len(team)
    valid = satisfies(result.tau, spec, labelers)
    if not valid:
        print("internal error: plan rejected by the semantics oracle", file=sys.stderr)
        return EXIT_ERROR
    doc = plan_document(sc, team, result, opts, args.deterministic, valid)
    fmt = args.format or "json"
    if fmt == "json":
        _emit(json.dumps(doc, indent=1, sort_keys=True) + "\n", args.output)
    elif fmt == "text":
        _emit(plan_text(doc, list(spec.leaves)), args.output)
    elif fmt == "svg":
        rows = [[(c["cell"], c["status"], c["assigned"]) for c in row] for row in doc["rows"]]
        _emit(views.gantt_svg(rows, list(spec.leaves), [ts.name for ts in team]), args.output)
    else:
        raise CliError(f"format {fmt!r} not available for plan")
    return EXIT_OK


def load_plan_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read plan {path}: {e}") from None
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION or "rows" not in doc:
        raise CliError(f"{path} is not a version {SCHEMA_VERSION} plan document")
    return doc


def _plan_context(doc, args):
    """Map, spec and profile for a plan document (flags override its sources)."""
    src = doc.get("sources", {})
    if getattr(args, "scenario", None):
        sc = scenario_from_args(args)
        map_path, spec_path, prof_name, prof_path = sc.map_path, sc.spec_path, sc.profile, sc.profiles_path
    else:
        map_path = _find(args.map, "") if getattr(args, "map", None) else src.get("map")
        spec_path = _find(args.spec, "specs") if getattr(args, "spec", None) else src.get("spec")
        prof_name = getattr(args, "profile", None) or src.get("profile", "office")
        prof_path = src.get("profiles")
    if not map_path or not spec_path:
        raise CliError("plan document names no map/spec; pass --map and --spec")
    grid = load_map(map_path)
    spec = load_spec(spec_path)
    profiles = load_profiles(prof_path)
    if prof_name not in profiles:
        raise CliError(f"unknown profile {prof_name!r}")
    return grid, spec, profiles[prof_name]


def tau_from_document(doc, grid, spec, profile):
    rows = []
    try:
        width = None
        for t, row in enumerate(doc["rows"]):
            if width is None:
                width = len(row)
            if len(row) != width:
                raise CliError(f"instant {t} lists {len(row)} robots, expected {width}")
            out = []
            for entry in row:
                cell = tuple(entry["cell"])
                status = entry["status"]
                psi = entry.get("assigned")
                if not grid.inside(cell) or cell in grid.obstacles:
                    raise CliError(f"instant {t}: cell {cell} is not free")
                if status not in profile.statuses:
                    raise CliError(f"instant {t}: unknown status {status!r}")
                if psi is not None and psi not in spec.leaves:
                    raise CliError(f"instant {t}: {psi!r} is not a leaf specification")
                out.append(((cell, status), psi))
            rows.append(out)
    except (KeyError, TypeError) as e:
        raise CliError(f"malformed plan row: {e}") from None
    tau = StateSpecSequence(rows)
    n = len(rows[0]) if rows else 0
    labelers = [lambda st: grid.labels_at(st[0]) | profile.statuses[st[1]]] * n
    return tau, labelers


def cmd_validate(args):
    doc = load_plan_document(args.plan)
    grid, spec, profile = _plan_context(doc, args)
    tau, labelers = tau_from_document(doc, grid, spec, profile)
    ok = satisfies(tau, spec, labelers)
    if tau.rows:
        outputs = output_words(tau, spec, labelers)
        print(views.output_timeline(outputs, spec.names), end="")
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_render(args):
    fmt = args.format or "text"
    if fmt == "dot":
        if args.plan:
            doc = load_plan_document(args.plan)
            _, spec, _ = _plan_context(doc, args)
        elif args.scenario:
            spec = load_spec(scenario_from_args(args).spec_path)
        elif args.spec:
            spec = load_spec(_find(args.spec, "specs"))
        else:
            raise CliError("render --format dot needs --spec, --scenario or a plan")
        _emit(spec.to_dot(), args.output)
        return EXIT_OK
    if not args.plan:
        raise CliError(f"render --format {fmt} needs a plan document")
    doc = load_plan_document(args.plan)
    grid, spec, _ = _plan_context(doc, args)
    rows = [[(tuple(c["cell"]), c["status"], c["assigned"]) for c in row] for row in doc["rows"]]
    names = [r["name"] for r in doc.get("robots", [])] or None
    if fmt == "text":
        _emit(views.timeline_text(rows, list(spec.leaves)) + "\n" + views.ascii_trace(grid, rows, args.every),
              args.output)
    elif fmt == "svg":
        _emit(views.gantt_svg(rows, list(spec.leaves), names), args.output)
    else:
        raise CliError(f"format {fmt!r} not available for render")
    return EXIT_OK


def run_bench(scenarios, configs, trials, seed, timeout=None, deterministic=False, weight=None):
    """Run every scenario/config pair over seeded random starts; one dict per run."""
    records = []
    for sc in scenarios:
        for k in range(trials):
            trial_seed = seed + k
            grid, spec, team, _ = _random_starts(sc).build(seed=trial_seed)
            for cfg in configs:
                opts = sc.options(heuristics=cfg, timeout=timeout, weight=weight)
                rec = {"scenario": sc.name, "config": cfg, "trial": k, "seed": trial_seed}
                t0 = time.perf_counter()
                try:
                    res = plan(spec, team, opts, ctx=PlanningContext(spec, team, opts))
                    rec.update(status="ok", cost=res.cost, explored=res.explored)
                except PlanningTimeout:
                    rec.update(status="timeout")
                except InfeasibleError:
                    rec.update(status="infeasible")
                except StateCapExceeded:
                    rec.update(status="cap")
                if not deterministic:
                    rec["time"] = time.perf_counter() - t0
                records.append(rec)
    return records


def _random_starts(sc):
    clone = Scenario(sc.name, sc.map_path, sc.spec_path, sc.profile, sc.robots, "random",
                     sc.seed, dict(sc.planner), sc.profiles_path)
    return clone


def _mean_std(values):
    if not values:
        return "---"
    m = statistics.fmean(values)
    s = statistics.pstdev(values) if len(values) > 1 else 0.0
    return f"{m:.1f}±{s:.1f}"


def bench_table(records, configs, deterministic=False):
    """Wide table: per scenario, a time (or explored-state) and a cost column per config."""
    scen = list(dict.fromkeys(r["scenario"] for r in records))
    metric = "n" if deterministic else "t"
    head = ["scenario"] + [f"{metric}[{c}]" for c in configs] + [f"c[{c}]" for c in configs] + ["failed"]
    lines = ["\t".join(head)]
    for s in scen:
        cols = [s]
        mine = [r for r in records if r["scenario"] == s]
        for c in configs:
            ok = [r for r in mine if r["config"] == c and r["status"] == "ok"]
            vals = [r["explored"] for r in ok] if deterministic else [r["time"] for r in ok]
            cols.append(_mean_std(vals))
        for c in configs:
            ok = [r for r in mine if r["config"] == c and r["status"] == "ok"]
            cols.append(_mean_std([r["cost"] for r in ok]))
        failed = [f"{r['config']}:{r['status']}" for r in mine if r["status"] != "ok"]
        cols.append(",".join(sorted(set(failed))) or "0")
        lines.append("\t".join(cols))
    return "\n".join(lines) + "\n"


def cmd_bench(args):
    names = args.scenario_list or (["scenario1"] if not args.scenario else [args.scenario])
    scenarios = [load_scenario(n) for n in names]
    if args.robots is not None:
        for sc in scenarios:
            sc.robots = args.robots
    configs = args.configs.split(",") if args.configs else list(HEURISTIC_PRESETS)
    for c in configs:
        if c not in HEURISTIC_PRESETS:
            raise CliError(f"unknown heuristic configuration {c!r}")
    records = run_bench(scenarios, configs, args.trials, args.seed or 0,
                        args.timeout, args.deterministic, args.weight)
    if args.format == "json":
        _emit(json.dumps({"schema_version": SCHEMA_VERSION, "kind": "hltlf-bench",
                          "records": records}, indent=1, sort_keys=True) + "\n", args.output)
    else:
        _emit(bench_table(records, configs, args.deterministic), args.output)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="hltlf", description="Hierarchical LTLf multi-robot planner")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--scenario", help="scenario TOML file or bundled scenario name")
        sp.add_argument("--spec", help="specification file")
        sp.add_argument("--map", help="map file")
        sp.add_argument("--profile", help="manipulation profile name")
        sp.add_argument("--robots", type=int)
        sp.add_argument("--starts", help="'x,y;x,y', 'map' or 'random'")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--format", choices=["text", "json", "svg", "dot"])
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    def planning(sp):
        sp.add_argument("--heuristics", choices=list(HEURISTIC_PRESETS))
        sp.add_argument("--weight", type=float)
        sp.add_argument("--objective", choices=["additive", "minmax"])
        sp.add_argument("--omega", type=float)
        sp.add_argument("--timeout", type=float)
        sp.add_argument("--deterministic", action="store_true",
                        help="leave wall-clock times out of the output")

    sp = sub.add_parser("plan", help="compute a plan")
    common(sp)
    planning(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("validate", help="check a plan with the semantics oracle")
    sp.add_argument("plan")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("bench", help="benchmark heuristic configurations")
    common(sp)
    planning(sp)
    sp.add_argument("--scenarios", dest="scenario_list", nargs="+")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--configs", help="comma list from none,order,switch,guide,all")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("render", help="draw a plan or a specification tree")
    sp.add_argument("plan", nargs="?")
    common(sp)
    sp.add_argument("--every", type=int, default=1, help="draw every n-th instant")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ScenarioError, SpecError, MapError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
