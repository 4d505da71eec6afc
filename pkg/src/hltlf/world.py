"""Grid maps, robot transition systems and per-robot product automata."""

from dataclasses import dataclass, field
from fnmatch import fnmatch
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


class MapError(ValueError):
    pass


@dataclass
class GridMap:
    """Rectangular grid; cells are ``(x, y)`` with x the column and y the row."""
    width: int
    height: int
    obstacles: frozenset
    regions: dict
    starts: dict = field(default_factory=dict)
    glyphs: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, cells in self.regions.items():
            bad = [c for c in cells if c in self.obstacles]
            if bad:
                raise MapError(f"region {name!r} overlaps obstacle at {bad[0]}")
            if any(not self.inside(c) for c in cells):
                raise MapError(f"region {name!r} leaves the grid")
        for r, c in self.starts.items():
            if not self.inside(c) or c in self.obstacles:
                raise MapError(f"robot {r} starts on a blocked cell {c}")
        self._labels = {}
        for name, cells in self.regions.items():
            for c in cells:
                self._labels.setdefault(c, set()).add(name)
        self._labels = {c: frozenset(v) for c, v in self._labels.items()}

    def inside(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def free_cells(self):
        return [(x, y) for y in range(self.height) for x in range(self.width)
                if (x, y) not in self.obstacles]

    def labels_at(self, cell):
        return self._labels.get(cell, frozenset())

    def unlabeled_cells(self):
        return [c for c in self.free_cells() if not self.labels_at(c)]

    def neighbours(self, cell):
        x, y = cell
        for nx, ny in ((x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1)):
            if self.inside((nx, ny)) and (nx, ny) not in self.obstacles:
                yield (nx, ny)

    def render(self, marks=None):
        """ASCII picture; ``marks`` maps cells to single characters."""
        marks = marks or {}
        legend = dict(self.glyphs)
        for name, cells in sorted(self.regions.items()):
            for c in cells:
                legend.setdefault(c, name[0])
        lines = []
        for y in range(self.height):
            row = []
            for x in range(self.width):
                c = (x, y)
                if c in marks:
                    row.append(marks[c])
                elif c in self.obstacles:
                    row.append("#")
                else:
                    row.append(legend.get(c, "."))
            lines.append("".join(row))
        return "\n".join(lines)


def parse_map(text):
    """Parse the plain-text map format (``grid:``, ``legend:``, robot lines)."""
    grid, legend, starts = [], {}, {}
    section = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if line.startswith(";"):
            continue
        if line.strip() in ("grid:", "legend:"):
            section = line.strip()[:-1]
            continue
        if not line.strip():
            continue
        if line.startswith("robot "):
            parts = line.split()
            if len(parts) != 4 or parts[2] != "AT":
                raise MapError(f"line {no}: expected 'robot r AT x,y'")
            try:
                x, y = (int(v) for v in parts[3].split(","))
            except ValueError:
                raise MapError(f"line {no}: bad coordinates {parts[3]!r}") from None
            if parts[1] in starts:
                raise MapError(f"line {no}: robot {parts[1]} placed twice")
            starts[parts[1]] = (x, y)
        elif section == "grid":
            grid.append(line)
        elif section == "legend":
            if "=" not in line:
                raise MapError(f"line {no}: expected 'c = name ...'")
            key, names = line.split("=", 1)
            key = key.strip()
            if len(key) != 1:
                raise MapError(f"line {no}: legend key must be one character")
            if key in legend:
                raise MapError(f"line {no}: legend key {key!r} defined twice")
            legend[key] = names.split()
        else:
            raise MapError(f"line {no}: content outside a section")
    if not grid:
        raise MapError("empty grid")
    width = len(grid[0])
    if any(len(r) != width for r in grid):
        raise MapError("grid rows differ in length")
    obstacles, regions, glyphs = set(), {}, {}
    owner = {}
    for key, names in legend.items():
        if "obstacle" in names:
            continue
        for n in names:
            if n in owner and owner[n] != key:
                raise MapError(f"region name {n!r} used by two legend keys")
            owner[n] = key
    for y, row in enumerate(grid):
        for x, ch in enumerate(row):
            if ch == ".":
                continue
            if ch not in legend:
                raise MapError(f"grid character {ch!r} missing from legend")
            names = legend[ch]
            if "obstacle" in names:
                if len(names) > 1:
                    raise MapError(f"legend key {ch!r} mixes obstacle and regions")
                obstacles.add((x, y))
                continue
            glyphs[(x, y)] = ch
            for n in names:
                regions.setdefault(n, set()).add((x, y))
    return GridMap(width, len(grid), frozenset(obstacles),
                   {n: frozenset(c) for n, c in regions.items()}, starts, glyphs)


def load_map(path_or_text):
    text = path_or_text
    if "\n" not in str(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    return parse_map(text)


def bundled(name):
    """Path of a file shipped in the package data directory."""
    return str(resources.files("hltlf") / "data" / name)


@dataclass(frozen=True)
class Profile:
    """Manipulation statuses a robot can hold and where it may switch them."""
    name: str
    statuses: dict
    initial: str
    toggles: tuple

    def __post_init__(self):
        if self.initial not in self.statuses:
            raise ValueError(f"profile {self.name}: unknown initial status {self.initial!r}")
        for src, dst, _ in self.toggles:
            for s in (src, dst):
                if s not in self.statuses:
                    raise ValueError(f"profile {self.name}: toggle uses unknown status {s!r}")


def load_profiles(path=None):
    path = path or bundled("profiles.toml")
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    out = {}
    for name, body in data.items():
        statuses = {k: frozenset(v) for k, v in body["statuses"].items()}
        toggles = tuple((t["from"], t["to"], t.get("at", "*")) for t in body.get("toggles", []))
        out[name] = Profile(name, statuses, body.get("initial", "default"), toggles)
    return out


@dataclass
class RobotConfig:
    start: tuple
    profile: Profile = None
    status: str = None
    name: str = "1"


BASIC = Profile("basic", {"default": frozenset({"default"})}, "default", ())
PLAIN = Profile("plain", {"default": frozenset()}, "default", ())


class TransitionSystem:
    """Finite robot model with integer states.

    ``succ[i]`` lists ``(j, cost)`` pairs with the zero-cost stay first;
    ``labels[i]`` is the frozenset of propositions true in state ``i``.
    """

    def __init__(self, states, initial, succ, labels, name="1", cells=None, statuses=None, key=None):
        self.states = list(states)
        # robots sharing a key share everything except the initial state
        self.key = key
        self.index = {s: i for i, s in enumerate(self.states)}
        self.initial = initial
        self.succ = succ
        self.labels = labels
        self.name = name
        self.cells = cells
        self.statuses = statuses
        if not 0 <= initial < len(self.states):
            raise ValueError("initial state outside the state set")

    def __len__(self):
        return len(self.states)

    def label(self, i):
        return self.labels[i]

    def cost(self, i, j):
        for k, c in self.succ[i]:
            if k == j:
                return c
        raise ValueError(f"no transition {self.states[i]} -> {self.states[j]}")

    def propositions(self):
        out = set()
        for lab in self.labels:
            out |= lab
        return frozenset(out)

    def describe(self, i):
        cell, status = self.states[i]
        return f"{cell[0]},{cell[1]}:{status}"


def build_ts(grid, robot, stay_cost=0, move_cost=1):
    """4-connected motion plus in-place status toggles from the robot's profile."""
    profile = robot.profile or BASIC
    status0 = robot.status or profile.initial
    if status0 not in profile.statuses:
        raise ValueError(f"unknown status {status0!r} for profile {profile.name}")
    if not grid.inside(robot.start) or robot.start in grid.obstacles:
        raise ValueError(f"robot {robot.name} starts on a blocked cell {robot.start}")
    cells = grid.free_cells()
    names = list(profile.statuses)
    states = [(c, s) for c in cells for s in names]
    index = {st: i for i, st in enumerate(states)}
    labels, succ = [], []
    interned = {}
    for c, s in states:
        lab = grid.labels_at(c) | profile.statuses[s]
        labels.append(interned.setdefault(lab, lab))
        i = index[(c, s)]
        out = [(i, stay_cost)]
        for n in grid.neighbours(c):
            out.append((index[(n, s)], move_cost))
        for src, dst, pattern in profile.toggles:
            here = pattern == "*" or any(fnmatch(r, pattern) for r in grid.labels_at(c))
            if src == s and here:
                out.append((index[(c, dst)], move_cost))
        succ.append(out)
    ts = TransitionSystem(states, index[(robot.start, status0)], succ, labels, robot.name,
                          cells=[st[0] for st in states], statuses=[st[1] for st in states],
                          key=(id(grid), id(profile), stay_cost, move_cost))
    # keep grid and profile alive so their ids in the key cannot be reused
    ts.grid, ts.profile = grid, profile
    return ts


class ProductAutomaton:
    """Lazy product of one transition system with one automaton.

    The automaton reads the label of the robot state being left, so a path of
    n moves feeds the labels of its first n states to the automaton.
    """

    def __init__(self, ts, nfa):
        self.ts = ts
        self.nfa = nfa
        self.initial = frozenset((ts.initial, q) for q in nfa.initial)

    def is_accepting(self, state):
        return state[1] in self.nfa.accepting

    def successors(self, state):
        s, q = state
        targets = self.nfa.step(q, self.ts.labels[s])
        if not targets:
            return
        for s2, cost in self.ts.succ[s]:
            for q2 in targets:
                yield (s2, q2), cost


def product(ts, nfa):
    return ProductAutomaton(ts, nfa)
