from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import call, fn, gain, model, sub
from oracles import cc_oracle, inline_links
from slm.errors import UnresolvedLibraryLink
from slm.fixtures import (
    clone_pair,
    estpower,
    generate_model,
    sds_after,
    sds_before,
    sds_library,
    shared_dictionary,
    small_example,
    small_example_dictionary,
)
from slm.interface import extract_interface
from slm.metrics import (
    DEFAULT_OUTCOMES,
    UNRESOLVED,
    cyclomatic_complexity,
    exported_block_count,
    interactions,
    interface_complexity,
    metrics_to_json,
    render_metrics_text,
)
from slm.model import Block, BlockPath, ModelFile, ModelKind, System


def cc(m, libs=()):
    return cyclomatic_complexity(m, libs).total


def link(name: str, source: str) -> Block:
    return Block(name, "LibraryLink", {"SourceBlock": source})


def test_empty_and_single_switch():
    assert cc(model()) == 0
    assert cc(model(Block("S", "Switch", {}))) == 2


def test_if_and_multiport_outcomes():
    assert cc(model(Block("I", "If", {"ElseIfExpressions": "a, b"}))) == 1 + 3
    assert cc(model(Block("I", "If", {"ShowElse": "off"}))) == 1 + 0
    assert cc(model(Block("M", "MultiPortSwitch", {"Inputs": 5}))) == 1 + 4
    assert cc(model(Block("M", "MultiPortSwitch", {}))) == 1 + 2


def test_atomic_units_without_decisions():
    assert cc(model(sub("A", [gain()], TreatAsAtomicUnit="on"), sub("V", [gain()]))) == 1
    assert cc(model(fn("f"), call("C1", "f"), call("C2", "f"))) == 1


def test_custom_outcome_table():
    rules = dict(DEFAULT_OUTCOMES, Saturation=lambda b: 3)
    m = model(Block("Sat", "Saturation", {}), Block("S", "Switch", {}))
    assert cyclomatic_complexity(m, outcome_rules=rules).total == 1 + 2 + 1


def test_commented_blocks_are_skipped():
    m = model(Block("S", "Switch", {}, commented=True))
    assert cc(m) == 0


def test_unresolved_link():
    with pytest.raises(UnresolvedLibraryLink):
        cyclomatic_complexity(model(link("L", "Nowhere/X")))
    lib = ModelFile("Lib", System([Block("A", "Gain", {})]), ModelKind.LIBRARY)
    with pytest.raises(UnresolvedLibraryLink):
        cyclomatic_complexity(model(link("L", "Lib/B")), [lib])


def test_cyclic_link_is_reported():
    lib = ModelFile("Lib", System([link("A", "Lib/B"), link("B", "Lib/A")]), ModelKind.LIBRARY)
    with pytest.raises(UnresolvedLibraryLink):
        cyclomatic_complexity(model(link("L", "Lib/A")), [lib])


def test_links_count_per_instance():
    lib, clones, functions = clone_pair()
    assert cc(clones, [lib]) == 1 + 18 * 4
    assert cc(functions) == 1 + 4 + 1


def test_contribution_excludes_base():
    r = cyclomatic_complexity(model(sub("A", [Block("S", "Switch", {})]), Block("T", "Switch", {})))
    assert r.total == 3 and r.contribution(BlockPath.parse("M/A")) == 1
    assert r.contribution(BlockPath.parse("M")) == r.total - r.base


# --- generated models against the oracle ------------------------------------------------


def _strip_links(system: System) -> System:
    for i, b in enumerate(system.blocks):
        if b.block_type == "LibraryLink":
            system.blocks[i] = Block(b.name, "Gain", {"Gain": 1}, b.position, commented=b.commented)
        elif b.inner is not None:
            _strip_links(b.inner)
    return system


def generated_libraries(seed: int) -> list[ModelFile]:
    """Libraries for every ``SourceBlock`` the generator can emit."""

    def body(k: int) -> System:
        return _strip_links(generate_model(1, 4, seed * 10 + k).root)

    lib_a = ModelFile("LibA", System([Block("Block1", "Subsystem", {}, inner=body(1)),
                                      Block("Block2", "Subsystem", {"TreatAsAtomicUnit": "on"}, inner=body(2))]), ModelKind.LIBRARY)
    deep = Block("Deep", "Subsystem", {}, inner=System([Block("Block", "Switch", {})]))
    lib_b = ModelFile("LibB", System([deep]), ModelKind.LIBRARY)
    return [lib_a, lib_b]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_cc_matches_oracle_on_inlined_model(seed):
    m = generate_model(3, 5, seed)
    libs = generated_libraries(seed)
    assert cc(m, libs) == cc_oracle(inline_links(m, libs))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["Switch", "If", "MultiPortSwitch"]))
def test_adding_a_decision_never_lowers_cc(seed, kind):
    m = generate_model(2, 4, seed)
    libs = generated_libraries(seed)
    before = cc(m, libs)
    m.root.blocks.append(Block("Added", kind, {}))
    assert cc(m, libs) >= before


# --- interface complexity ----------------------------------------------------------------


def test_interface_complexity_small_example():
    icx = interface_complexity(extract_interface(small_example(), [small_example_dictionary()]))
    assert icx["total"] == sum(v for k, v in icx.items() if k != "total")
    assert icx["Inport"] == 1 and icx["Outport"] == 3


def test_interface_complexity_of_module():
    assert interface_complexity(extract_interface(estpower()))["total"] == 1


# --- interactions --------------------------------------------------------------------------


def test_no_peers():
    r = interactions(model(gain()))
    assert r.total == 0 and r.per_peer == {}


def test_scaled_link_fixture():
    lib = ModelFile("Lib", System([Block(f"B{i}", "Gain", {}) for i in range(10)]), ModelKind.LIBRARY)
    m = model(*[link(f"L{k}", f"Lib/B{k % 10}") for k in range(20)])
    r = interactions(m, [lib])
    assert (r.library_link_count, r.exported_block_count, r.per_peer) == (20, 10, {"Lib": 20})
    assert exported_block_count(lib) == 10


def test_unresolved_peer_bucket():
    r = interactions(model(link("L", "Gone/X"), Block("R", "ModelReference", {"ModelName": "Other"})))
    assert r.per_peer == {UNRESOLVED: 2}


def test_qualified_call_goes_to_referenced_model():
    r = interactions(sds_after(), [sds_library(False), estpower()])
    assert (r.model_reference_count, r.external_call_count) == (1, 1)
    assert r.per_peer == {"SDS_Library": 313, "EstPower": 2}


def test_shared_store_attributed_to_dictionary():
    a = model(Block("W", "DataStoreWrite", {"DataStoreName": "SharedLevel"}), name="A")
    b = model(Block("R", "DataStoreRead", {"DataStoreName": "SharedLevel"}), name="B")
    d = shared_dictionary()
    r = interactions(a, [b], [d])
    assert r.shared_data_store_count == 1 and r.per_peer == {d.name: 1}
    assert interactions(a, [], [d]).shared_data_store_count == 0


def test_case_study_link_counts():
    before = interactions(sds_before(), [sds_library(True)])
    assert (before.library_link_count, before.exported_block_count) == (344, 156)


def test_renderers_agree():
    c = cyclomatic_complexity(sds_before(), [sds_library(True)])
    inter = interactions(sds_before(), [sds_library(True)])
    doc = json.loads(metrics_to_json(c, None, inter))
    text = render_metrics_text(c, None, inter)
    assert doc["cyclomaticComplexity"]["total"] == c.total
    assert f"{c.total}\n" in text.splitlines(keepends=True)[0]
    assert doc["interactions"]["libraryLinkCount"] == 344
