"""
Where can a function be called from?
====================================

Build one function under different ancestors and ask which systems can see
it.  Then check a model against the four modelling guidelines.
"""

from slm.fixtures import caller, function, subsystem
from slm.guidelines import render_diagnostics_text, run_guidelines
from slm.model import Block, ModelFile, System
from slm.scope import FunctionTable, scope_of


def body():
    return [Block("Gain", "Gain", {"Gain": 1})]


def build(**ancestor_params):
    f = function("f", body())
    holder = subsystem("Holder", [f, subsystem("Child", body())], **ancestor_params)
    return ModelFile("M", System([holder, subsystem("Elsewhere", body())]))


# a virtual holder lets its descendants call f; an atomic one keeps f to itself
for label, params in [("virtual", {}), ("atomic", {"TreatAsAtomicUnit": "on"})]:
    m = build(**params)
    (f,) = FunctionTable(m).functions
    s = scope_of(f, m)
    print(f"{label:8} {s.case.name:12} visible in: {sorted(str(p) for p in s.visible_systems)}")

# guideline 1 wants a function next to its callers; this one sits at the root
# but only Holder uses it
m = ModelFile("M", System([function("f", body()), subsystem("Holder", [caller("Call_f", "y = f(u)")])]))
print(render_diagnostics_text(run_guidelines(m)), end="")
