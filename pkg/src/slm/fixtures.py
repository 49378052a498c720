"""Replica fixtures and a seeded random model generator.

Replicas:

* ``small_example``: the small demonstration model with one of each interface
  element and a model reference to ``sl_subsys_for1``.
* ``sds_before`` / ``sds_library(before=True)``: a safety system whose power
  estimation (``PE``) is built from 31 links into a shared library.
* ``estpower`` / ``sds_after`` / ``sds_library(before=False)``: the same system after
  power estimation moved into its own module exporting one function.
* ``violation_corpus``: small models with seeded guideline violations and the
  diagnostics each is expected to produce.

The checked-in files under ``slm/data`` are produced by :func:`write_data`.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from slm.model import Block, BlockKind, ModelFile, ModelKind, SignalLine, System
from slm.parser import DataStoreDecl, DictionaryFile, ScopeKind, serialize_dictionary, serialize_model

DATA_DIR = Path(str(resources.files("slm") / "data"))

_W, _H = 30, 30


def pos(col: int, row: int, w: int = _W, h: int = _H) -> tuple[int, int, int, int]:
    x, y = 100 + col * 120, 100 + row * 70
    return (x, y, x + w, y + h)


def blk(name: str, block_type: str, at=None, inner: System | None = None, **params) -> Block:
    return Block(name, block_type, params, at, inner=inner)


def line(src: str, sp: int, dst: str, dp: int) -> SignalLine:
    return SignalLine(src, sp, dst, dp)


def switches(n: int, prefix: str = "Switch") -> list[Block]:
    return [blk(f"{prefix}{i + 1}", "Switch", pos(2, i)) for i in range(n)]


def function(
    name: str,
    body: list[Block],
    *,
    ins=(("u", "double", 1),),
    outs=(("y", "double", 1),),
    visibility: str = "scoped",
    function_name: str | None = None,
    at=None,
    **params,
) -> Block:
    """A function-definition subsystem with typed arguments."""
    trigger = {"IsSimulinkFunction": "on", "FunctionVisibility": visibility}
    if function_name is not None:
        trigger["FunctionName"] = function_name
    blocks = [blk("Trigger", "TriggerPort", pos(1, 0), **trigger)]
    for i, (arg, dtype, dims) in enumerate(ins):
        blocks.append(blk(arg, "ArgIn", pos(0, i + 1), Port=i + 1, OutDataTypeStr=dtype, PortDimensions=dims))
    for i, (arg, dtype, dims) in enumerate(outs):
        blocks.append(blk(arg, "ArgOut", pos(4, i + 1), Port=i + 1, OutDataTypeStr=dtype, PortDimensions=dims))
    return blk(name, "Subsystem", at, System(blocks + body), **params)


def caller(name: str, prototype: str, at=None, ins: str = "double(1)", outs: str = "double(1)") -> Block:
    return blk(
        name,
        "FunctionCaller",
        at,
        Prototype=prototype,
        InputArgumentSpecifications=ins,
        OutputArgumentSpecifications=outs,
    )


def subsystem(name: str, blocks: list[Block], lines: list[SignalLine] = (), at=None, **params) -> Block:
    return blk(name, "Subsystem", at, System(list(blocks), list(lines)), **params)


# --- small example -------------------------------------------------------------


def small_example() -> ModelFile:
    fn = function(
        "Simulink Function",
        [blk("Gain", "Gain", pos(2, 1), Gain=2)],
        ins=(("u", "uint16", 1),),
        outs=(("y", "uint16", 1),),
        at=pos(3, 4, 90, 50),
    )
    fn.inner.lines = [line("u", 1, "Gain", 1), line("Gain", 1, "y", 1)]
    inner = subsystem(
        "Subsystem",
        [
            blk("In1", "Inport", pos(0, 0), Port=1),
            blk("Switch", "Switch", pos(1, 0)),
            blk("Memory", "DataStoreMemory", pos(1, 1), DataStoreName="Local"),
            blk("Read", "DataStoreRead", pos(0, 1), DataStoreName="Local"),
            blk("Out1", "Outport", pos(2, 0), Port=1),
        ],
        [line("In1", 1, "Switch", 1), line("Read", 1, "Switch", 2), line("In1", 1, "Switch", 3), line("Switch", 1, "Out1", 1)],
        at=pos(1, 0, 60, 40),
    )
    root = System(
        [
            blk("In1", "Inport", pos(0, 0), Port=1, OutDataTypeStr="uint16", PortDimensions=1, SampleTime=1),
            inner,
            blk("Model", "ModelReference", pos(1, 1, 60, 40), ModelName="sl_subsys_for1"),
            blk("Out1", "Outport", pos(3, 0), Port=1, PortDimensions=1, SampleTime=1),
            blk("Out2", "Outport", pos(3, 1), Port=2, SampleTime=1),
            blk("Out3", "Outport", pos(3, 2), Port=3, SampleTime=1),
            blk("To File1", "ToFile", pos(3, 3), FileName="out1.mat"),
            blk("To File2", "ToFile", pos(3, 4), FileName="out2.mat"),
            blk("Data Store Write", "DataStoreWrite", pos(2, 3), DataStoreName="A"),
            fn,
        ],
        [
            line("In1", 1, "Subsystem", 1),
            line("Subsystem", 1, "Out1", 1),
            line("In1", 1, "Data Store Write", 1),
            line("In1", 1, "To File1", 1),
        ],
    )
    return ModelFile("SmallExample", root)


def small_example_dictionary() -> DictionaryFile:
    return DictionaryFile([DataStoreDecl("A", "uint16", 1, 1)], "small_example.smd", ScopeKind.DICTIONARY)


# --- power-estimation case study -------------------------------------------------

LIBRARY = "SDS_Library"
MODULE = "EstPower"

# moved library blocks: name -> (internal decision complexity, links from PE before)
PE_BLOCKS = {
    "Valid_ith_NOP_Signal_Indicator": (4, 18),
    "Estimated_Power": (20, 1),
    "f_AvePower": (25, 1),
    "Average_Power_Defaulted": (26, 1),
    "NOP_Sensor_Status": (0, 10),
}
OTHER_LIBRARY_BLOCKS = 151
OTHER_LINKS = 313
LOCAL_TRIP_UNITS = 163  # each holds a 13-way MultiPortSwitch: 12 each


def _decisions(cc: int) -> list[Block]:
    """Decision blocks worth exactly ``cc``: one 3-way If (2) plus Switches (1 each)."""
    if cc == 0:
        return [blk("Gain", "Gain", pos(2, 0), Gain=1)]
    if cc == 1:
        return switches(1)
    return [blk("If", "If", pos(2, 0), IfExpression="u1 > 0", ElseIfExpressions="u1 < 0", ShowElse="on")] + switches(
        cc - 2
    )


def _library_subsystem(name: str, cc: int, at) -> Block:
    body = [blk("In1", "Inport", pos(0, 0), Port=1), blk("Out1", "Outport", pos(4, 0), Port=1)]
    return subsystem(name, body + _decisions(cc), at=at)


def _other_name(i: int) -> str:
    specials = {0: "f_HTHPsentrip", 1: "f_NOPsentrip"}
    return specials.get(i, f"Lib_Block_{i:03d}")


def sds_library(before: bool) -> ModelFile:
    blocks = []
    if before:
        for i, (name, (cc, _)) in enumerate(PE_BLOCKS.items()):
            blocks.append(_library_subsystem(name, cc, pos(0, i, 60, 40)))
    for i in range(OTHER_LIBRARY_BLOCKS):
        blocks.append(_library_subsystem(_other_name(i), 1, pos(1 + i // 40, i % 40, 60, 40)))
    return ModelFile(LIBRARY, System(blocks), ModelKind.LIBRARY)


def _link(name: str, target: str, at) -> Block:
    return blk(name, "LibraryLink", at, SourceBlock=f"{LIBRARY}/{target}")


def _sds_common() -> list[Block]:
    """Everything in the safety system that the restructuring leaves alone."""
    blocks = [blk(f"Sensor_{i + 1}", "Inport", pos(0, i), Port=i + 1, OutDataTypeStr="double") for i in range(4)]
    blocks += [blk(f"Trip_{i + 1}", "Outport", pos(9, i), Port=i + 1) for i in range(2)]
    # 313 links over 151 blocks: the first 11 are linked three times, the rest twice
    links = []
    for i in range(OTHER_LIBRARY_BLOCKS):
        for k in range(3 if i < OTHER_LINKS - 2 * OTHER_LIBRARY_BLOCKS else 2):
            links.append(_link(f"{_other_name(i)}_{k + 1}", _other_name(i), None))
    groups = [links[g::10] for g in range(10)]
    for g, members in enumerate(groups):
        for r, b in enumerate(members):
            b.position = pos(r % 8, r // 8)
        blocks.append(subsystem(f"Channel_{g + 1}", members, at=pos(2, g, 60, 40)))
    trips = []
    for i in range(LOCAL_TRIP_UNITS):
        trips.append(subsystem(f"Trip_Logic_{i + 1:03d}", [blk("Select", "MultiPortSwitch", pos(1, 0), Inputs=13)]))
    for r, b in enumerate(trips):
        b.position = pos(r % 10, r // 10, 60, 40)
    blocks.append(subsystem("Trip_Logic", trips, at=pos(4, 0, 60, 40)))
    return blocks


def pe_links() -> list[Block]:
    links = []
    for name, (_, count) in PE_BLOCKS.items():
        for k in range(count):
            links.append(_link(f"{name}_{k + 1}" if count > 1 else name, name, None))
    for r, b in enumerate(links):
        b.position = pos(r % 6, r // 6, 60, 40)
    return links


def sds_before() -> ModelFile:
    blocks = _sds_common() + [subsystem("PE", pe_links(), at=pos(6, 0, 80, 60))]
    return ModelFile("SDS", System(blocks))


ESTIMATED_POWER_PROTOTYPE = "y = EstPower.Estimated_Power(u)"


def sds_after() -> ModelFile:
    blocks = _sds_common() + [
        blk(MODULE, "ModelReference", pos(6, 0, 80, 60), ModelName=MODULE),
        caller("Call_Estimated_Power", ESTIMATED_POWER_PROTOTYPE, pos(6, 1, 80, 40)),
    ]
    return ModelFile("SDS", System(blocks))


def estpower() -> ModelFile:
    """Power estimation as a module; only ``Estimated_Power`` is exported.

    Each hidden function sits in the one system that holds all its callers.
    """
    cc = {name: c for name, (c, _) in PE_BLOCKS.items()}
    valid = function("Valid_ith_NOP_Signal_Indicator", _decisions(cc["Valid_ith_NOP_Signal_Indicator"]), at=pos(0, 0))
    status = function("NOP_Sensor_Status", _decisions(cc["NOP_Sensor_Status"]), at=pos(0, 1))
    ave_body = [valid, status]
    ave_body += [caller(f"Call_Valid_{k + 1}", "y = Valid_ith_NOP_Signal_Indicator(u)", pos(1 + k % 6, 2 + k // 6)) for k in range(18)]
    ave_body += [caller(f"Call_Status_{k + 1}", "y = NOP_Sensor_Status(u)", pos(1 + k % 6, 6 + k // 6)) for k in range(10)]
    ave_decisions = _decisions(cc["f_AvePower"])
    for r, b in enumerate(ave_decisions):
        b.position = pos(8, r)
    ave_body += ave_decisions
    ave = function("f_AvePower", ave_body, at=pos(0, 0))
    defaulted = function("Average_Power_Defaulted", _decisions(cc["Average_Power_Defaulted"]), at=pos(0, 1))
    top_body = [
        ave,
        defaulted,
        caller("Call_f_AvePower", "y = f_AvePower(u)", pos(1, 0)),
        caller("Call_Average_Power_Defaulted", "y = Average_Power_Defaulted(u)", pos(1, 1)),
    ] + _decisions(cc["Estimated_Power"])
    top = function("Estimated_Power", top_body, at=pos(1, 0, 90, 60))
    return ModelFile(MODULE, System([top]))


def clone_pair() -> tuple[ModelFile, ModelFile, ModelFile]:
    """(library, 18 links to a complexity-4 block, one function called 18 times)."""
    lib = ModelFile("CloneLib", System([_library_subsystem("Indicator", 4, pos(0, 0))]), ModelKind.LIBRARY)
    links = [blk(f"Indicator_{k + 1}", "LibraryLink", pos(k % 6, k // 6), SourceBlock="CloneLib/Indicator") for k in range(18)]
    clones = ModelFile("Clones", System(links))
    fn = function("Indicator", _decisions(4), at=pos(0, 4))
    calls = [caller(f"Call_{k + 1}", "y = Indicator(u)", pos(k % 6, k // 6)) for k in range(18)]
    functions = ModelFile("Functions", System([fn] + calls))
    return lib, clones, functions


# --- guideline violation corpus ----------------------------------------------------


@dataclass
class CorpusCase:
    path: str  # relative to the corpus directory
    model: ModelFile
    expected: list = field(default_factory=list)  # (rule id, subject path)
    dicts: list = field(default_factory=list)


def shared_dictionary() -> DictionaryFile:
    return DictionaryFile(
        [DataStoreDecl("SharedLevel", "double", 1, 0.1), DataStoreDecl("SharedMode", "uint8", 1, 0.1)],
        "shared.smd",
        ScopeKind.DICTIONARY,
    )


def base_workspace_dictionary() -> DictionaryFile:
    return DictionaryFile(
        [DataStoreDecl("BaseGain", "double", 1, -1), DataStoreDecl("BaseFlag", "boolean", 1, -1)],
        "base_ws.smd",
        ScopeKind.BASE_WORKSPACE,
    )


def _fn(name: str, **kw) -> Block:
    return function(name, [blk("Gain", "Gain", pos(2, 1), Gain=1)], **kw)


def _call(name: str, fn: str) -> Block:
    return caller(name, f"y = {fn}(u)")


def _model(name: str, blocks: list[Block]) -> ModelFile:
    for i, b in enumerate(blocks):
        if b.position is None:
            b.position = pos(i % 6, i // 6, 60, 40)
    return ModelFile(name, System(blocks))


def _sub(name: str, blocks: list[Block], **params) -> Block:
    for i, b in enumerate(blocks):
        if b.position is None:
            b.position = pos(i % 6, i // 6, 60, 40)
    return subsystem(name, blocks, **params)


def violation_corpus() -> list[CorpusCase]:
    cases: list[CorpusCase] = []

    def add(rel: str, model: ModelFile, expected=(), dicts=()):
        cases.append(CorpusCase(rel, model, [(r, s) for r, s in expected], list(dicts)))

    # G1 placement
    add(
        "g1/pos_root_above.sml",
        _model("G1RootAbove", [_fn("f"), _sub("SubA", [_call("Caller1", "f"), _call("Caller2", "f")])]),
        [("G1_Placement", "G1RootAbove/f")],
    )
    add(
        "g1/pos_nested_above.sml",
        _model(
            "G1NestedAbove",
            [_sub("SubA", [_fn("f"), _sub("SubB", [_sub("SubC", [_call("Caller", "f")]), _call("Caller2", "f")])])],
        ),
        [("G1_Placement", "G1NestedAbove/SubA/f")],
    )
    add(
        "g1/pos_global_below.sml",
        _model("G1GlobalBelow", [_sub("SubA", [_sub("SubB", [_fn("f", visibility="global")]), _call("Caller", "f")])]),
        [("G1_Placement", "G1GlobalBelow/SubA/SubB/f"), ("G2_Visibility", "G1GlobalBelow/SubA/SubB/f")],
    )
    add(
        "g1/pos_global_root.sml",
        _model("G1GlobalRoot", [_fn("f", visibility="global"), _sub("SubA", [_call("Caller", "f")])]),
        [("G1_Placement", "G1GlobalRoot/f"), ("G2_Visibility", "G1GlobalRoot/f")],
    )
    add(
        "g1/neg_lca.sml",
        _model(
            "G1Lca",
            [_sub("SubA", [_fn("f"), _sub("SubB", [_call("Caller", "f")]), _sub("SubC", [_call("Caller", "f")])])],
        ),
    )
    add("g1/neg_exported_unused.sml", _model("G1Exported", [_fn("f")]))
    add("g1/neg_same_system.sml", _model("G1Same", [_sub("SubA", [_fn("f"), _call("Caller", "f")])]))
    add(
        "g1/neg_suppressed.sml",
        _model("G1Suppressed", [_fn("f", SLMLintAllow="G1"), _sub("SubA", [_call("Caller", "f")])]),
    )

    # G2 visibility
    add("g2/pos_global_root.sml", _model("G2Root", [_fn("f", visibility="global")]), [("G2_Visibility", "G2Root/f")])
    add(
        "g2/pos_global_nested.sml",
        _model("G2Nested", [_sub("SubA", [_fn("f", visibility="global"), _call("Caller", "f")])]),
        [("G2_Visibility", "G2Nested/SubA/f")],
    )
    add(
        "g2/pos_two_globals.sml",
        _model("G2Two", [_fn("f", visibility="global"), _fn("g", visibility="global")]),
        [("G2_Visibility", "G2Two/f"), ("G2_Visibility", "G2Two/g")],
    )
    add("g2/neg_scoped_root.sml", _model("G2Scoped", [_fn("f")]))
    add("g2/neg_scoped_nested.sml", _model("G2ScopedNested", [_sub("SubA", [_fn("f"), _call("Caller", "f")])]))
    add("g2/neg_no_functions.sml", _model("G2Empty", [blk("In1", "Inport", Port=1), blk("Out1", "Outport", Port=1)]))
    add("g2/neg_suppressed.sml", _model("G2Suppressed", [_fn("f", visibility="global", SLMLintAllow="G2")]))

    # G3 shadowing
    add(
        "g3/pos_root_and_nested.sml",
        _model("G3RootNested", [_fn("f"), _sub("SubA", [_fn("f")])]),
        [("G3_Shadowing", "G3RootNested/SubA/f")],
    )
    add(
        "g3/pos_global_overlap.sml",
        _model("G3Global", [_sub("SubA", [_sub("SubB", [_fn("f", visibility="global")])]), _sub("SubC", [_fn("f")])]),
        [("G3_Shadowing", "G3Global/SubA/SubB/f"), ("G2_Visibility", "G3Global/SubA/SubB/f")],
    )
    add(
        "g3/pos_nested_virtual.sml",
        _model("G3Nested", [_sub("SubA", [_fn("f"), _sub("SubB", [_fn("f")])])]),
        [("G3_Shadowing", "G3Nested/SubA/SubB/f")],
    )
    add("g3/neg_siblings.sml", _model("G3Siblings", [_sub("SubA", [_fn("f")]), _sub("SubB", [_fn("f")])]))
    add(
        "g3/neg_arity.sml",
        _model("G3Arity", [_fn("f"), _sub("SubA", [_fn("f", ins=(("u", "double", 1), ("v", "double", 1)))])]),
    )
    add("g3/neg_unique.sml", _model("G3Unique", [_fn("f"), _sub("SubA", [_fn("g")]), _sub("SubB", [_fn("h")])]))
    add(
        "g3/neg_atomic_siblings.sml",
        _model(
            "G3Atomic",
            [_sub("SubA", [_fn("f")], TreatAsAtomicUnit="on"), _sub("SubB", [_fn("f")], TreatAsAtomicUnit="on")],
        ),
    )

    # G4 base workspace
    shared, base = "shared.smd", "base_ws.smd"
    add(
        "g4/pos_from_workspace.sml",
        _model("G4FromWs", [blk("From Workspace", "FromWorkspace", VariableName="simin"), blk("Out1", "Outport", Port=1)]),
        [("G4_BaseWorkspace", "G4FromWs/From Workspace")],
    )
    add(
        "g4/pos_to_workspace.sml",
        _model("G4ToWs", [blk("In1", "Inport", Port=1), _sub("Logging", [blk("To Workspace", "ToWorkspace", VariableName="simout")])]),
        [("G4_BaseWorkspace", "G4ToWs/Logging/To Workspace")],
    )
    add(
        "g4/pos_base_store.sml",
        _model(
            "G4BaseStore",
            [blk("Read", "DataStoreRead", DataStoreName="BaseGain"), blk("Read Shared", "DataStoreRead", DataStoreName="SharedLevel")],
        ),
        [("G4_BaseWorkspace", "G4BaseStore/Read")],
        [base, shared],
    )
    add(
        "g4/neg_dictionary_store.sml",
        _model("G4Dict", [blk("Write", "DataStoreWrite", DataStoreName="SharedMode")]),
        (),
        [shared, base],
    )
    add("g4/neg_to_file.sml", _model("G4ToFile", [blk("In1", "Inport", Port=1), blk("To File", "ToFile", FileName="log.mat")]))
    add(
        "g4/neg_local_store.sml",
        _model(
            "G4Local",
            [blk("Memory", "DataStoreMemory", DataStoreName="BaseGain"), _sub("Use", [blk("Read", "DataStoreRead", DataStoreName="BaseGain")])],
        ),
        (),
        [base],
    )
    add(
        "g4/neg_suppressed.sml",
        _model("G4Suppressed", [blk("From Workspace", "FromWorkspace", VariableName="simin", SLMLintAllow="G4")]),
    )

    # one violation of each rule in a single model
    add(
        "all_rules.sml",
        _model(
            "AllRules",
            [
                _fn("place"),
                _sub("SubA", [_call("Caller", "place"), _fn("dup")]),
                _fn("exposed", visibility="global"),
                _fn("dup"),
                blk("To Workspace", "ToWorkspace", VariableName="simout"),
            ],
        ),
        [
            ("G1_Placement", "AllRules/place"),
            ("G2_Visibility", "AllRules/exposed"),
            ("G3_Shadowing", "AllRules/SubA/dup"),
            ("G4_BaseWorkspace", "AllRules/To Workspace"),
        ],
    )
    return cases


# --- data files --------------------------------------------------------------------


def data_files() -> dict[str, str]:
    """Relative path -> file text for every checked-in fixture."""
    files = {
        "small_example.sml": serialize_model(small_example()),
        "small_example.smd": serialize_dictionary(small_example_dictionary()),
        "before/sds.sml": serialize_model(sds_before()),
        "before/sds_library.sml": serialize_model(sds_library(before=True)),
        "after/estpower.sml": serialize_model(estpower()),
        "after/sds.sml": serialize_model(sds_after()),
        "after/sds_library.sml": serialize_model(sds_library(before=False)),
        "violations/shared.smd": serialize_dictionary(shared_dictionary()),
        "violations/base_ws.smd": serialize_dictionary(base_workspace_dictionary()),
    }
    manifest = {}
    for case in violation_corpus():
        files[f"violations/{case.path}"] = serialize_model(case.model)
        manifest[case.path] = {"dicts": case.dicts, "expected": [list(e) for e in case.expected]}
    files["violations/manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return files


def write_data(target: Path = DATA_DIR) -> list[Path]:
    written = []
    for rel, text in data_files().items():
        path = Path(target) / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        written.append(path)
    return written


def data_path(rel: str) -> Path:
    return DATA_DIR / rel


# --- random generator ----------------------------------------------------------------

STORE_POOL = ("DS_A", "DS_B", "DS_C", "DS_D")
_DTYPES = ("double", "single", "uint8", "uint16", "int32", "boolean", "Inherit: auto")
_LEAF_KINDS = (
    "Inport",
    "Outport",
    "Gain",
    "Sum",
    "Switch",
    "MultiPortSwitch",
    "If",
    "DataStoreMemory",
    "DataStoreRead",
    "DataStoreWrite",
    "ToFile",
    "FromFile",
    "FromSpreadsheet",
    "ToWorkspace",
    "FromWorkspace",
    "Goto",
    "From",
    "ModelReference",
    "LibraryLink",
    "FunctionCaller",
)


@dataclass
class GenSpec:
    depth: int = 2
    blocks_per_system: int = 6
    subsystems_per_system: int = 2
    seed: int = 0
    function_rate: float = 0.3
    atomic_rate: float = 0.2
    commented_rate: float = 0.05
    name: str = "Gen"


class _Gen:
    def __init__(self, spec: GenSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.fn_names: list[str] = []
        self.counter = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def params(self, kind: str) -> dict:
        r = self.rng
        p: dict = {}
        if kind in ("Inport", "Outport"):
            p["OutDataTypeStr"] = r.choice(_DTYPES)
            p["PortDimensions"] = r.choice([1, 2, -1, [2, 3]])
            p["SampleTime"] = r.choice([1, -1, 0.1, 0.01])
        elif kind == "Gain":
            p["Gain"] = r.choice([1, 2.5, -3, [1, 2, 3]])
        elif kind == "MultiPortSwitch":
            p["Inputs"] = r.randint(2, 6)
        elif kind == "If":
            p["IfExpression"] = "u1 > 0"
            p["ElseIfExpressions"] = ",".join(["u1 < 0", "u1 == 2"][: r.randint(0, 2)])
            p["ShowElse"] = r.choice(["on", "off"])
        elif kind.startswith("DataStore"):
            p["DataStoreName"] = r.choice(STORE_POOL)
        elif kind in ("ToFile", "FromFile", "FromSpreadsheet"):
            p["FileName"] = f"data_{r.randint(0, 9)}.mat"
        elif kind in ("ToWorkspace", "FromWorkspace"):
            p["VariableName"] = "simout\twith \"quotes\"" if r.random() < 0.1 else "simout"
        elif kind in ("Goto", "From"):
            p["GotoTag"] = r.choice(["A", "B"])
        elif kind == "ModelReference":
            p["ModelName"] = r.choice(["RefA", "RefB"])
        elif kind == "LibraryLink":
            p["SourceBlock"] = r.choice(["LibA/Block1", "LibA/Block2", "LibB/Deep/Block"])
        elif kind == "FunctionCaller":
            target = r.choice(self.fn_names) if self.fn_names and r.random() < 0.8 else "missing"
            if r.random() < 0.2:
                target = f"RefA.{target}"
            p["Prototype"] = f"y = {target}(u)"
            p["InputArgumentSpecifications"] = "double(1)"
            p["OutputArgumentSpecifications"] = "double(1)"
        return p

    def system(self, level: int) -> System:
        r, spec = self.rng, self.spec
        blocks: list[Block] = []
        ports = {"Inport": 0, "Outport": 0}
        for i in range(spec.blocks_per_system):
            kind = r.choice(_LEAF_KINDS)
            if kind in ports:
                ports[kind] += 1
            params = self.params(kind)
            if kind in ports:
                params["Port"] = ports[kind]
            b = Block(self.fresh(kind), kind, params, pos(i % 6, i // 6) if r.random() < 0.8 else None)
            b.commented = r.random() < spec.commented_rate
            blocks.append(b)
        if level < spec.depth:
            for _ in range(spec.subsystems_per_system):
                blocks.append(self.subsystem(level + 1))
        lines = self.wire(blocks)
        return System(blocks, lines)

    def subsystem(self, level: int) -> Block:
        r = self.rng
        is_fn = r.random() < self.spec.function_rate
        name = self.fresh("Fn" if is_fn else "Sub")
        inner = self.system(level)
        params: dict = {}
        if is_fn:
            fname = f"fn_{self.counter}" if r.random() < 0.7 else r.choice(self.fn_names or ["shared_fn"])
            self.fn_names.append(fname)
            trigger = {"IsSimulinkFunction": "on", "FunctionName": fname, "FunctionVisibility": r.choice(["scoped", "scoped", "global"])}
            inner.blocks.insert(0, Block(self.fresh("trigger"), "TriggerPort", trigger))
            inner.blocks.append(Block(self.fresh("u"), "ArgIn", {"Port": 1, "OutDataTypeStr": "double", "PortDimensions": 1}))
            inner.blocks.append(Block(self.fresh("y"), "ArgOut", {"Port": 1, "OutDataTypeStr": "double", "PortDimensions": 1}))
        elif r.random() < self.spec.atomic_rate:
            params["TreatAsAtomicUnit"] = "on"
        return Block(name, "Subsystem", params, pos(0, 8), inner=inner)

    def wire(self, blocks: list[Block]) -> list[SignalLine]:
        from slm.parser import port_counts

        sources, sinks = [], []
        for b in blocks:
            counts = port_counts(b)
            if counts is None:
                continue
            ins, outs = counts
            sources += [(b.name, p) for p in range(1, outs + 1)]
            sinks += [(b.name, p) for p in range(1, ins + 1)]
        self.rng.shuffle(sinks)
        lines = []
        for dst, dp in sinks[: len(sinks) // 2]:
            if not sources:
                break
            src, sp = self.rng.choice(sources)
            lines.append(SignalLine(src, sp, dst, dp))
        return lines


def generate_model(
    depth: int = 2, blocks_per_system: int = 6, seed: int = 0, *, subsystems_per_system: int = 2, **kw
) -> ModelFile:
    spec = GenSpec(depth=depth, blocks_per_system=blocks_per_system, subsystems_per_system=subsystems_per_system, seed=seed, **kw)
    gen = _Gen(spec)
    root = gen.system(0)
    return ModelFile(spec.name, root)


def generator_dictionary() -> DictionaryFile:
    return DictionaryFile([DataStoreDecl(n, "double", 1, -1) for n in STORE_POOL], "generated.smd", ScopeKind.DICTIONARY)


# size of a mid-sized industrial model
CENSUS_BLOCKS = 6036
CENSUS_SUBSYSTEMS = 605


def census_model(seed: int = 0) -> ModelFile:
    """Wide two-level model: 11 groups of 54 units, 605 subsystems, about 6036 blocks."""
    rng = random.Random(seed)
    gen = _Gen(GenSpec(seed=seed, function_rate=0.0, commented_rate=0.0, atomic_rate=0.1))
    groups = []
    per_leaf = 9
    for g in range(11):
        leaves = []
        for k in range(54):
            gen.spec.blocks_per_system = per_leaf
            inner = gen.system(gen.spec.depth)
            params = {"TreatAsAtomicUnit": "on"} if rng.random() < 0.1 else {}
            leaves.append(Block(f"Unit_{g}_{k}", "Subsystem", params, pos(k % 9, k // 9, 60, 40), inner=inner))
        groups.append(Block(f"Group_{g}", "Subsystem", {}, pos(1, g, 60, 40), inner=System(leaves)))
    top = [Block(f"In{i + 1}", "Inport", {"Port": i + 1}, pos(0, i)) for i in range(74)]
    top += [Block(f"Out{i + 1}", "Outport", {"Port": i + 1}, pos(9, i)) for i in range(7)]
    return ModelFile("Census", System(top + groups))
