from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import all_scope_configurations, call, fn, model, scope_configuration, sub
from oracles import accessible, system_paths
from slm.errors import AmbiguousCall, MalformedFunction, OutOfScope, SignatureMismatch, UnknownFunction
from slm.fixtures import estpower, generate_model, small_example, sds_after
from slm.model import Block, BlockPath
from slm.scope import (
    Arg,
    CallSite,
    FunctionSignature,
    FunctionTable,
    Placement,
    ScopeCase,
    Visibility,
    call_site,
    case_of,
    collect_call_sites,
    collect_functions,
    detect_shadowing,
    format_arg_specs,
    format_prototype,
    list_callable,
    parse_arg_specs,
    parse_prototype,
    resolve_call,
    scope_of,
)


def P(text: str) -> BlockPath:
    return BlockPath.parse(text)


def test_small_example_function_defaults():
    (f,) = collect_functions(small_example())
    assert str(f.path) == "SmallExample/Simulink Function"
    assert f.function_name == "Simulink Function"
    assert f.visibility is Visibility.SCOPED and f.placement is Placement.ROOT
    assert f.signature.inputs[0].data_type == "uint16"


def test_placement_kinds():
    m = model(sub("V", [fn("a")]), sub("T", [sub("V2", [fn("b")])], TreatAsAtomicUnit="on"), fn("c"))
    by = {f.function_name: f.placement for f in collect_functions(m)}
    assert by == {"a": Placement.VIRTUAL, "b": Placement.NONVIRTUAL, "c": Placement.ROOT}


def test_no_functions():
    assert collect_functions(model(sub("S", []))) == []


def test_commented_function_is_ignored():
    f = fn("f")
    f.commented = True
    assert collect_functions(model(f)) == []


def test_two_triggers_is_malformed():
    f = fn("f")
    f.inner.blocks.append(Block("Trigger2", "TriggerPort", {"IsSimulinkFunction": "on"}))
    with pytest.raises(MalformedFunction):
        collect_functions(model(f))


def test_argument_order_follows_port_numbers():
    f = fn("f", ins=(("a", "double", 1), ("b", "uint8", 2)))
    a, b = [x for x in f.inner.blocks if x.block_type == "ArgIn"]
    a.params["Port"], b.params["Port"] = 2, 1
    (d,) = collect_functions(model(f))
    assert [x.name for x in d.signature.inputs] == ["b", "a"]


@pytest.mark.parametrize(
    "visibility, kinds, case",
    [
        ("global", ("virtual", "virtual", "virtual"), ScopeCase.GLOBAL),
        ("scoped", (), ScopeCase.ROOT_SCOPED),
        ("scoped", ("virtual",), ScopeCase.VIRTUAL),
        ("scoped", ("virtual", "atomic"), ScopeCase.NONVIRTUAL),
        ("scoped", ("atomic", "virtual"), ScopeCase.NONVIRTUAL),
        ("scoped", ("function",), ScopeCase.NONVIRTUAL),
    ],
)
def test_cases(visibility, kinds, case):
    m, path = scope_configuration(visibility, kinds)
    f = next(f for f in collect_functions(m) if f.path.segments == path)
    result = scope_of(f, m)
    assert result.case is case
    assert result.externally_visible == (case in (ScopeCase.GLOBAL, ScopeCase.ROOT_SCOPED))


def test_case3_region_is_parent_and_descendants():
    m = model(sub("SubA", [fn("f"), sub("SubB", [sub("SubC", [])])]), sub("Other", []))
    (f,) = collect_functions(m)
    region = {str(s) for s in scope_of(f, m).visible_systems}
    assert region == {"M/SubA", "M/SubA/SubB", "M/SubA/SubB/SubC", "M/SubA/f"}


def test_qualifier_only_for_root_scoped():
    m, _ = scope_configuration("scoped", ())
    (f,) = collect_functions(m)
    assert scope_of(f, m, "Ref").call_qualifier == "Ref"
    m, _ = scope_configuration("global", ())
    (f,) = collect_functions(m)
    assert scope_of(f, m, "Ref").call_qualifier is None


@pytest.mark.parametrize("visibility, kinds", list(all_scope_configurations()))
def test_region_matches_oracle(visibility, kinds):
    m, path = scope_configuration(visibility, kinds)
    table = FunctionTable(m)
    f = next(f for f in table.functions if f.path.segments == path)
    for system in system_paths(m):
        assert (BlockPath(system) in table.region(f)) == accessible(m, path, system), system


def test_partition_and_set_laws():
    for seed in range(40):
        m = generate_model(3, 4, seed)
        fs = collect_functions(m)
        cases = [case_of(f) for f in fs]
        assert all(isinstance(c, ScopeCase) for c in cases)
        fd = {f.path for f in fs}
        fg = {f.path for f in fs if f.visibility is Visibility.GLOBAL}
        fsc = {f.path for f in fs if f.visibility is Visibility.SCOPED}
        fl = {f.path for f in fs if f.visibility is Visibility.SCOPED and f.placement is not Placement.ROOT}
        assert fl <= fsc <= fd and not (fg & fsc)


# --- prototypes -------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, expected",
    [
        ("y = f(u)", (["y"], "f", ["u"])),
        ("[a,b] = Ref.g(x, y)", (["a", "b"], "Ref.g", ["x", "y"])),
        ("h()", ([], "h", [])),
        ("= broken(", None),
    ],
)
def test_parse_prototype(text, expected):
    assert parse_prototype(text) == expected


def test_arg_specs_round_trip():
    args = (Arg("u", "uint16", "1"), Arg("v", "double", "[2 3]"))
    assert parse_arg_specs(format_arg_specs(args)) == [("uint16", "1"), ("double", "[2 3]")]
    assert format_prototype("f", FunctionSignature(args, (Arg("y"),))) == "y = f(u,v)"


def test_call_site_reads_specs():
    b = Block("C", "FunctionCaller", {"Prototype": "y = f(u)", "InputArgumentSpecifications": "uint16(1)"})
    c = call_site(P("M/C"), b)
    assert c.called_name == "f" and c.signature.inputs[0].data_type == "uint16"
    assert c.signature.outputs[0].data_type == "auto"


# --- resolution ---------------------------------------------------------------------


def _call(m, path):
    return next(c for c in collect_call_sites(m) if str(c.path) == path)


def test_resolve_case3_from_descendant():
    m = model(sub("SubA", [fn("f"), sub("SubB", [call("C", "f")])]))
    assert str(resolve_call(_call(m, "M/SubA/SubB/C"), m).path) == "M/SubA/f"


def test_resolve_case4_from_root_is_out_of_scope():
    m = model(sub("SubC", [fn("f")], TreatAsAtomicUnit="on"), call("C", "f"))
    with pytest.raises(OutOfScope) as info:
        resolve_call(_call(m, "M/C"), m)
    assert str(info.value.nearest) == "M/SubC/f"


def test_resolve_qualified_import():
    sds, ep = sds_after(), estpower()
    c = _call(sds, "SDS/Call_Estimated_Power")
    assert str(resolve_call(c, sds, [("EstPower", ep)]).path) == "EstPower/Estimated_Power"
    with pytest.raises(UnknownFunction):
        resolve_call(c, sds)


def test_qualified_call_cannot_reach_hidden_function():
    c = CallSite(P("SDS/C"), "EstPower.f_AvePower", FunctionSignature((Arg("u"),), (Arg("y"),)))
    with pytest.raises(OutOfScope):
        resolve_call(c, sds_after(), {"EstPower": estpower()})


def test_innermost_wins():
    m = model(fn("f"), sub("SubA", [fn("f"), call("C", "f")]))
    assert str(resolve_call(_call(m, "M/SubA/C"), m).path) == "M/SubA/f"


def test_ambiguous_same_system():
    m2 = model(fn("a", function_name="f"), fn("b", function_name="f"), call("C", "f"))
    with pytest.raises(AmbiguousCall):
        resolve_call(_call(m2, "M/C"), m2)


def test_signature_mismatch():
    m = model(fn("f"), Block("C", "FunctionCaller", {"Prototype": "[a,b] = f(u)"}))
    with pytest.raises(SignatureMismatch):
        resolve_call(_call(m, "M/C"), m)


def test_type_wildcards():
    m = model(fn("f", ins=(("u", "Inherit: auto", 1),)), call("C", "f"))
    assert resolve_call(_call(m, "M/C"), m).function_name == "f"


def test_unknown_function():
    m = model(call("C", "nothing"))
    with pytest.raises(UnknownFunction):
        resolve_call(_call(m, "M/C"), m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000))
def test_resolution_agrees_with_oracle(seed):
    """A resolved call always binds to a function the caller can reach, nearest first."""
    m = generate_model(3, 4, seed)
    table = FunctionTable(m)
    for c in collect_call_sites(m):
        if c.qualifier:
            continue
        reachable = [
            f for f in table.named(c.called_name)
            if accessible(m, f.path.segments, c.path.parent.segments) and f.signature.compatible(c.signature)
        ]
        try:
            f = resolve_call(c, table)
        except (UnknownFunction, OutOfScope, SignatureMismatch):
            assert not reachable
            continue
        except AmbiguousCall:
            assert len(reachable) >= 2
            continue
        assert f in reachable
        depth = lambda g: len(g.path.segments) if g.parent_system.contains(c.path.parent) else -1  # noqa: E731
        assert depth(f) == max(depth(g) for g in reachable)


# --- shadowing and listing ------------------------------------------------------------


def test_shadowing_root_and_nested():
    m = model(fn("f"), sub("SubA", [fn("f")]))
    ((a, b),) = detect_shadowing(m)
    assert (str(a.path), str(b.path)) == ("M/SubA/f", "M/f")


def test_shadowing_disjoint_and_arity():
    assert detect_shadowing(model(sub("A", [fn("f")]), sub("B", [fn("f")]))) == []
    assert detect_shadowing(model(fn("f"), sub("A", [fn("f", ins=(("u", "double", 1), ("v", "double", 1)))]))) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5000))
def test_shadowing_matches_region_oracle(seed):
    m = generate_model(3, 3, seed, function_rate=0.6)
    table = FunctionTable(m)
    systems = system_paths(m)
    expected = set()
    fs = sorted(table.functions, key=lambda f: f.path)
    for i, a in enumerate(fs):
        for b in fs[i + 1:]:
            if a.function_name != b.function_name or not a.signature.compatible(b.signature):
                continue
            if any(accessible(m, a.path.segments, s) and accessible(m, b.path.segments, s) for s in systems):
                expected.add((a.path, b.path))
    got = {(a.path, b.path) for a, b in detect_shadowing(table)}
    assert got == expected
    assert all(a.path < b.path for a, b in detect_shadowing(table))


def test_list_callable():
    m = small_example()
    assert [n for n, _ in list_callable("SmallExample", m)] == ["Simulink Function"]
    isolated = model(sub("A", [fn("f")], TreatAsAtomicUnit="on"), sub("B", []))
    assert list_callable("M/B", isolated) == []
    names = [n for n, _ in list_callable("SDS", sds_after(), [("EstPower", estpower())])]
    assert names == ["EstPower.Estimated_Power"]
