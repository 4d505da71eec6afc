"""Compare heuristic presets on office scenarios; pass scenario names to choose."""

import sys

from hltlf.cli import bench_table, run_bench
from hltlf.scenario import load_scenario

names = sys.argv[1:] or ["scenario1"]
configs = ["none", "all"]
records = run_bench([load_scenario(n) for n in names], configs, trials=2, seed=0, timeout=60)
print(bench_table(records, configs), end="")
