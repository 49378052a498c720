"""
Turning library blocks into a module
====================================

A safety system links a power-estimation library block 31 times.  The
restructured version moves those blocks into their own model, exposes one
function, and calls it once.  Compare complexity and coupling before and
after.
"""

from slm.deps import collect_dependencies
from slm.fixtures import data_path
from slm.metrics import cyclomatic_complexity, interactions
from slm.model import BlockPath
from slm.parser import load_model
from slm.refactor import create_caller
from slm.scope import list_callable

before = load_model(data_path("before/sds.sml"))
before_lib = load_model(data_path("before/sds_library.sml"))
after = load_model(data_path("after/sds.sml"))
after_lib = load_model(data_path("after/sds_library.sml"))
module = load_model(data_path("after/estpower.sml"))

# every link expands in place, so the same logic is paid for once per instance
cc_before = cyclomatic_complexity(before, [before_lib])
cc_after = cyclomatic_complexity(after, [after_lib])
cc_module = cyclomatic_complexity(module)
pe = cc_before.contribution(BlockPath.parse("SDS/PE"))
print(f"power estimation: {pe} as links, {cc_module.total} as a module")
print(f"whole system: {cc_before.total} -> {cc_after.total + cc_module.total}")

# coupling: fewer links, one model reference, one qualified call
i_before = interactions(before, [before_lib])
i_after = interactions(after, [after_lib, module])
print("per peer before:", i_before.per_peer)
print("per peer after: ", i_after.per_peer)
print("dependencies after:", [(name, kind.value) for name, kind in collect_dependencies(after)])

# the module exports a single function; hidden helpers stay hidden
imports = [("EstPower", module)]
print("callable from SDS:", [name for name, _ in list_callable("SDS", after, imports)])
added = create_caller(after, "SDS", "EstPower.Estimated_Power", imports)
print("new caller:", added.added[0], added.model.find(added.added[0]).params["Prototype"])
