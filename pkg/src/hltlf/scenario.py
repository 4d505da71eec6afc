"""Scenario files: map, specification, robot team and planner settings."""

import os
import random
from dataclasses import dataclass, field

from .hierarchy import load_spec
from .planner import HEURISTIC_PRESETS, PlannerOptions
from .world import RobotConfig, build_ts, bundled, load_map, load_profiles

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    map_path: str
    spec_path: str
    profile: str = "office"
    robots: int = 2
    starts: object = "random"
    seed: int = 0
    planner: dict = field(default_factory=dict)
    profiles_path: str = None

    def __post_init__(self):
        for p in (self.map_path, self.spec_path):
            if not os.path.exists(p):
                raise ScenarioError(f"{self.name}: missing file {p}")
        if self.robots < 1:
            raise ScenarioError(f"{self.name}: need at least one robot")
        if isinstance(self.starts, (list, tuple)) and len(self.starts) != self.robots:
            raise ScenarioError(f"{self.name}: {len(self.starts)} starts for {self.robots} robots")
        h = self.planner.get("heuristics", "all")
        if h not in HEURISTIC_PRESETS:
            raise ScenarioError(f"{self.name}: unknown heuristics preset {h!r}")

    def options(self, **override):
        cfg = dict(self.planner)
        cfg.update({k: v for k, v in override.items() if v is not None})
        preset = cfg.pop("heuristics", "all")
        return PlannerOptions.preset(preset, **cfg)

    def start_cells(self, grid, seed=None):
        """Robot start cells; random starts are drawn from unlabeled free cells."""
        if isinstance(self.starts, (list, tuple)):
            return [tuple(c) for c in self.starts]
        if self.starts == "map":
            names = sorted(grid.starts, key=lambda n: (len(n), n))
            if len(names) < self.robots:
                raise ScenarioError(f"{self.name}: map places {len(names)} robots, need {self.robots}")
            return [grid.starts[n] for n in names[:self.robots]]
        if self.starts == "random":
            rng = random.Random(self.seed if seed is None else seed)
            pool = grid.unlabeled_cells()
            if len(pool) < self.robots:
                raise ScenarioError(f"{self.name}: not enough unlabeled cells")
            return rng.sample(pool, self.robots)
        raise ScenarioError(f"{self.name}: bad starts value {self.starts!r}")

    def build(self, seed=None, starts=None):
        """Return ``(grid, spec, team, profile)`` ready for planning."""
        grid = load_map(self.map_path)
        spec = load_spec(self.spec_path)
        profiles = load_profiles(self.profiles_path)
        if self.profile not in profiles:
            raise ScenarioError(f"{self.name}: unknown profile {self.profile!r}")
        profile = profiles[self.profile]
        cells = starts or self.start_cells(grid, seed)
        team = [build_ts(grid, RobotConfig(tuple(c), profile, name=str(i + 1)))
                for i, c in enumerate(cells)]
        return grid, spec, team, profile


def _resolve(base, path):
    if path is None:
        return None
    if os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(base, path))


def load_scenario(path):
    """Load a scenario TOML file; bare names refer to bundled scenarios."""
    if not os.path.exists(path) and not os.sep in path:
        name = path if path.endswith(".toml") else path + ".toml"
        path = bundled(os.path.join("scenarios", name))
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    try:
        return Scenario(
            name=data.get("name", os.path.splitext(os.path.basename(path))[0]),
            map_path=_resolve(base, data["map"]),
            spec_path=_resolve(base, data["spec"]),
            profile=data.get("profile", "office"),
            robots=int(data.get("robots", 2)),
            starts=data.get("starts", "random"),
            seed=int(data.get("seed", 0)),
            planner=dict(data.get("planner", {})),
            profiles_path=_resolve(base, data.get("profiles")),
        )
    except KeyError as e:
        raise ScenarioError(f"{path}: missing key {e.args[0]!r}") from None


def bundled_scenarios():
    folder = bundled("scenarios")
    return sorted(f[:-5] for f in os.listdir(folder) if f.endswith(".toml"))
