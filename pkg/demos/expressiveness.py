"""Two leaves no single trace satisfies, yet two robots satisfy them together."""

from hltlf.automata import is_empty, translate
from hltlf.hierarchy import StateSpecSequence, load_spec, satisfies
from hltlf.ltlf import And, render
from hltlf.world import bundled

spec = load_spec(bundled("specs/expressiveness.hltlf"))
flat = And(spec.formulas["first"], spec.formulas["second"])
print("flat formula:", render(flat))
print("  language empty:", is_empty(translate(flat)))

# robot 1 sees a, robot 2 sees b, each serving its own leaf at instant 0
tau = StateSpecSequence([[("r1", "first"), ("r2", "second")]])
labels = [{"r1": {"a"}}, {"r2": {"b"}}]
print("hierarchical spec satisfied:", satisfies(tau, spec, labels))
