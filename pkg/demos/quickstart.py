"""Plan the pick-and-place task for two robots and check it with the oracle."""

from hltlf.hierarchy import load_spec, output_words, satisfies
from hltlf.planner import PlannerOptions, labelers, plan
from hltlf.render import ascii_trace, output_timeline, timeline_text
from hltlf.world import BASIC, RobotConfig, build_ts, bundled, load_map

grid = load_map(bundled("pickplace.map"))
spec = load_spec(bundled("specs/pickplace.hltlf"))
print(spec.to_text())

team = [build_ts(grid, RobotConfig(grid.starts[r], BASIC, name=r)) for r in ("1", "2")]
result = plan(spec, team, PlannerOptions.preset("all"))
print(f"cost {result.cost}, per robot {result.robot_costs}, {result.explored} states explored")
for seg in result.segments:
    print(f"  {seg.leaf}: instants {seg.start}..{seg.end}, robots {[r + 1 for r in seg.robots]}")

rows = [[(cell, status, psi) for (cell, status), psi in row] for row in result.tau.rows]
print(timeline_text(rows, list(spec.leaves)))
print(ascii_trace(grid, rows, every=4))

labs = labelers(team)
print(output_timeline(output_words(result.tau, spec, labs), spec.names), end="")
print("oracle verdict:", satisfies(result.tau, spec, labs))
