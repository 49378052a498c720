from __future__ import annotations

import json
import os

from builders import model
from slm.deps import (
    DepKind,
    collect_dependencies,
    dependencies_to_json,
    dictionary_params,
    render_dependencies_text,
    resolve_closure,
    search_path_from_env,
)
from slm.fixtures import estpower, sds_after, small_example, small_example_dictionary
from slm.model import Block
from slm.parser import serialize_model


def ref(name: str, target: str) -> Block:
    return Block(name, "ModelReference", {"ModelName": target})


def write(tmp_path, m, name=None):
    p = tmp_path / f"{name or m.name}.sml"
    p.write_text(serialize_model(m))
    return p


def test_small_example_references_one_model():
    assert collect_dependencies(small_example()) == [("sl_subsys_for1", DepKind.MODEL_REFERENCE)]


def test_restructured_system_dependencies():
    assert collect_dependencies(sds_after()) == [("SDS_Library", DepKind.LIBRARY_LINK), ("EstPower", DepKind.MODEL_REFERENCE)]


def test_module_without_dependencies():
    assert collect_dependencies(estpower()) == []


def test_dictionaries_from_params_and_arguments():
    m = model(ref("R", "X"))
    m.params["DataDictionary"] = "shared.smd, other"
    assert dictionary_params(m) == ["shared", "other"]
    deps = collect_dependencies(m, [small_example_dictionary()])
    assert deps[1:] == [("shared", DepKind.DICTIONARY), ("other", DepKind.DICTIONARY), (small_example_dictionary().name, DepKind.DICTIONARY)]


def test_duplicates_collapse_in_document_order():
    m = model(ref("R1", "B"), ref("R2", "A"), ref("R3", "B"))
    assert [n for n, _ in collect_dependencies(m)] == ["B", "A"]


def test_chain(tmp_path):
    a = write(tmp_path, model(ref("R", "B"), name="A"))
    write(tmp_path, model(ref("R", "C"), name="B"))
    write(tmp_path, model(name="C"))
    g = resolve_closure(a)
    assert sorted(g.nodes) == ["A", "B", "C"] and g.unresolved == [] and g.cycles() == []
    assert sorted((x, y) for x, y, _, _ in g.edges) == [("A", "B"), ("B", "C")]


def test_cycle_is_reported(tmp_path):
    a = write(tmp_path, model(ref("R", "B"), name="A"))
    write(tmp_path, model(ref("R", "A"), name="B"))
    assert resolve_closure(a).cycles() == [["A", "B"]]


def test_missing_dependency(tmp_path):
    a = write(tmp_path, model(ref("R", "Gone"), name="A"))
    g = resolve_closure(a)
    assert g.unresolved == ["Gone"] and g.nodes["Gone"] is None
    assert "unresolved: Gone" in g.to_text()
    assert '"Gone" style="dashed"' in g.to_dot()


def test_case_insensitive_file_name(tmp_path):
    a = write(tmp_path, model(ref("R", "Lower"), name="A"))
    write(tmp_path, model(name="Lower"), name="lower")
    assert resolve_closure(a).unresolved == []


def test_ambiguity_warns_and_uses_first(tmp_path):
    one, two = tmp_path / "one", tmp_path / "two"
    one.mkdir(), two.mkdir()
    a = write(tmp_path, model(ref("R", "B"), name="A"))
    write(one, model(name="B"))
    write(two, model(name="B"))
    g = resolve_closure(a, [tmp_path, one, two])
    assert g.nodes["B"] == str(one / "B.sml")
    assert len(g.warnings) == 1 and "several" in g.warnings[0]


def test_edge_counts_and_outputs(tmp_path):
    a = write(tmp_path, model(ref("R1", "B"), ref("R2", "B"), name="A"))
    write(tmp_path, model(name="B"))
    g = resolve_closure(a)
    assert g.edges == [("A", "B", DepKind.MODEL_REFERENCE, 2)]
    doc = g.to_json()
    assert doc["edges"] == [{"from": "A", "to": "B", "kind": "ModelReference", "count": 2}]
    assert '"A" -> "B" [label="ModelReference x2"];' in g.to_dot()
    assert g.as_networkx().number_of_edges() == 1


def test_search_path_from_env(tmp_path):
    env = f"{tmp_path}{os.pathsep}{tmp_path / 'x'}"
    assert search_path_from_env(env) == [tmp_path, tmp_path / "x"]
    assert search_path_from_env("") == []


def test_flat_renderers():
    deps = collect_dependencies(sds_after())
    assert render_dependencies_text(deps) == "SDS_Library (LibraryLink)\nEstPower (ModelReference)\n"
    assert json.loads(dependencies_to_json(deps))[1] == {"name": "EstPower", "kind": "ModelReference"}
