"""Function definitions, their scopes, and call resolution.

A function is a ``Subsystem`` whose inner system holds a ``TriggerPort`` with
``IsSimulinkFunction "on"``.  Where it can be called from depends on its
visibility and on where it sits:

====  =====================  ==========  ================================
case  placement              visibility  callable from
====  =====================  ==========  ================================
1     anywhere               global      the whole model and client models
2     root                   scoped      the whole model; clients qualify
3     virtual subsystem      scoped      the parent system and below
4     nonvirtual subsystem   scoped      the parent system only
====  =====================  ==========  ================================

A subsystem counts as nonvirtual when it has ``TreatAsAtomicUnit "on"`` or is
itself a function definition.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from slm.errors import (
    AmbiguousCall,
    MalformedFunction,
    OutOfScope,
    SignatureMismatch,
    UnknownFunction,
)
from slm.model import Block, BlockKind, BlockPath, ModelFile, as_path

WILDCARD_TYPES = frozenset({"", "auto", "Inherit: auto"})


class Visibility(str, Enum):
    SCOPED = "scoped"
    GLOBAL = "global"


class Placement(str, Enum):
    ROOT = "Root"
    VIRTUAL = "VirtualSubsystem"
    NONVIRTUAL = "NonvirtualSubsystem"


class ScopeCase(int, Enum):
    GLOBAL = 1
    ROOT_SCOPED = 2
    VIRTUAL = 3
    NONVIRTUAL = 4


def param_text(value, default: str) -> str:
    if value is None:
        return default
    if isinstance(value, list):
        return "[" + " ".join(param_text(v, "") for v in value) + "]"
    return str(value)


@dataclass(frozen=True)
class Arg:
    name: str
    data_type: str = "Inherit: auto"
    dimensions: str = "-1"
    sample_time: str = "-1"


@dataclass(frozen=True)
class FunctionSignature:
    inputs: tuple[Arg, ...] = ()
    outputs: tuple[Arg, ...] = ()

    @property
    def arity(self) -> tuple[int, int]:
        return len(self.inputs), len(self.outputs)

    def compatible(self, other: "FunctionSignature") -> bool:
        """Same arity, and equal types wherever both sides declare one."""
        if self.arity != other.arity:
            return False
        pairs = zip(self.inputs + self.outputs, other.inputs + other.outputs)
        return all(
            a.data_type == b.data_type or a.data_type in WILDCARD_TYPES or b.data_type in WILDCARD_TYPES
            for a, b in pairs
        )

    def __str__(self) -> str:
        ins = ", ".join(a.data_type for a in self.inputs)
        outs = ", ".join(a.data_type for a in self.outputs)
        return f"({ins}) -> ({outs})"


@dataclass(frozen=True)
class FunctionDef:
    path: BlockPath
    function_name: str
    visibility: Visibility
    signature: FunctionSignature
    placement: Placement

    @property
    def parent_system(self) -> BlockPath:
        return self.path.parent

    @property
    def externally_visible(self) -> bool:
        return self.visibility is Visibility.GLOBAL or self.placement is Placement.ROOT


@dataclass(frozen=True)
class ScopeResult:
    case: ScopeCase
    visible_systems: frozenset
    externally_visible: bool
    call_qualifier: str | None = None


@dataclass(frozen=True)
class CallSite:
    path: BlockPath
    called_name: str
    signature: FunctionSignature

    @property
    def qualifier(self) -> str | None:
        return self.called_name.split(".", 1)[0] if "." in self.called_name else None

    @property
    def base_name(self) -> str:
        return self.called_name.rsplit(".", 1)[-1]


# --- discovery ---------------------------------------------------------------


def function_trigger(block: Block, path: BlockPath | None = None) -> Block | None:
    """The function-definition trigger of a subsystem, if it has one."""
    if block.kind is not BlockKind.SUBSYSTEM or block.inner is None:
        return None
    triggers = [
        b for b in block.inner.blocks
        if b.kind is BlockKind.TRIGGER_PORT and not b.commented and b.flag("IsSimulinkFunction")
    ]
    if len(triggers) > 1:
        raise MalformedFunction(path or block.name)
    return triggers[0] if triggers else None


def is_nonvirtual(block: Block) -> bool:
    return block.kind is BlockKind.SUBSYSTEM and (block.flag("TreatAsAtomicUnit") or function_trigger(block) is not None)


def _ordered_args(blocks: Iterable[Block]) -> tuple[Arg, ...]:
    indexed = []
    for i, b in enumerate(blocks):
        port = b.param("Port")
        indexed.append((port if isinstance(port, (int, float)) else math.inf, i, b))
    indexed.sort(key=lambda t: (t[0], t[1]))
    return tuple(
        Arg(
            name=str(b.param("ArgumentName", b.name)),
            data_type=param_text(b.param("OutDataTypeStr"), "Inherit: auto"),
            dimensions=param_text(b.param("PortDimensions"), "-1"),
            sample_time=param_text(b.param("SampleTime"), "-1"),
        )
        for _, _, b in indexed
    )


def signature_of(block: Block) -> FunctionSignature:
    inner = [b for b in block.inner.blocks if not b.commented]
    return FunctionSignature(
        inputs=_ordered_args(b for b in inner if b.kind is BlockKind.ARG_IN),
        outputs=_ordered_args(b for b in inner if b.kind is BlockKind.ARG_OUT),
    )


def collect_functions(model: ModelFile) -> list[FunctionDef]:
    functions = []
    nonvirtual_systems: set[BlockPath] = set()
    for path, block in model.iter_blocks():
        trigger = function_trigger(block, path)
        if block.kind is BlockKind.SUBSYSTEM and (trigger is not None or block.flag("TreatAsAtomicUnit")):
            nonvirtual_systems.add(path)
        if trigger is None:
            continue
        if len(path.segments) == 2:
            placement = Placement.ROOT
        elif any(a in nonvirtual_systems for a in path.ancestors()):
            placement = Placement.NONVIRTUAL
        else:
            placement = Placement.VIRTUAL
        raw_vis = str(trigger.param("FunctionVisibility", "scoped")).lower()
        visibility = Visibility.GLOBAL if raw_vis == "global" else Visibility.SCOPED
        name = trigger.param("FunctionName") or block.name
        functions.append(FunctionDef(path, str(name), visibility, signature_of(block), placement))
    return functions


# --- call sites --------------------------------------------------------------

_PROTOTYPE = re.compile(
    r"""^\s*
    (?:(?:\[(?P<outs>[^\]]*)\]|(?P<out>[A-Za-z_]\w*))\s*=\s*)?
    (?P<name>[A-Za-z_](?:[\w ]*\w)?(?:\.[A-Za-z_](?:[\w ]*\w)?)?)  # names may hold spaces
    \s*\((?P<ins>[^)]*)\)\s*$""",
    re.VERBOSE,
)


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append(tail)
    return [p for p in parts if p]


def parse_arg_specs(text: str) -> list[tuple[str, str]]:
    """``"uint16(1), double([2 3])"`` -> ``[("uint16", "1"), ("double", "[2 3]")]``."""
    specs = []
    for part in _split_top(text):
        m = re.fullmatch(r"([^()]+?)\s*(?:\((.*)\))?", part)
        if m is None:
            specs.append((part, "-1"))
        else:
            specs.append((m.group(1), m.group(2) if m.group(2) is not None else "-1"))
    return specs


def parse_prototype(prototype: str) -> tuple[list[str], str, list[str]] | None:
    m = _PROTOTYPE.match(prototype)
    if m is None:
        return None
    if m.group("outs") is not None:
        outs = [s for s in re.split(r"[\s,]+", m.group("outs")) if s]
    elif m.group("out"):
        outs = [m.group("out")]
    else:
        outs = []
    ins = [s for s in re.split(r"[\s,]+", m.group("ins")) if s]
    return outs, m.group("name"), ins


def call_site(path: BlockPath, block: Block) -> CallSite:
    prototype = str(block.param("Prototype", ""))
    parsed = parse_prototype(prototype)
    if parsed is None:
        return CallSite(path, prototype.strip(), FunctionSignature())
    outs, name, ins = parsed

    def args(names, spec_key):
        specs = parse_arg_specs(str(block.param(spec_key, "")))
        result = []
        for i, n in enumerate(names):
            dtype, dims = specs[i] if i < len(specs) else ("auto", "-1")
            result.append(Arg(n, dtype, dims))
        return tuple(result)

    sig = FunctionSignature(args(ins, "InputArgumentSpecifications"), args(outs, "OutputArgumentSpecifications"))
    return CallSite(path, name, sig)


def collect_call_sites(model: ModelFile) -> list[CallSite]:
    return [call_site(p, b) for p, b in model.iter_blocks() if b.kind is BlockKind.FUNCTION_CALLER]


# --- scope computation ---------------------------------------------------------


class FunctionTable:
    """Functions of one model with their visibility regions, computed once."""

    def __init__(self, model: ModelFile):
        self.model = model
        self.functions = collect_functions(model)
        self.systems = frozenset(p for p, _ in model.iter_systems())
        self._regions: dict[BlockPath, frozenset] = {}
        for f in self.functions:
            self._regions[f.path] = self._region(f)
        self._by_name: dict[str, list[FunctionDef]] = {}
        for f in self.functions:
            self._by_name.setdefault(f.function_name, []).append(f)

    def _region(self, f: FunctionDef) -> frozenset:
        case = case_of(f)
        if case in (ScopeCase.GLOBAL, ScopeCase.ROOT_SCOPED):
            return self.systems
        parent = f.parent_system
        if case is ScopeCase.NONVIRTUAL:
            return frozenset({parent})
        return frozenset(s for s in self.systems if parent.contains(s))

    def region(self, f: FunctionDef) -> frozenset:
        return self._regions[f.path]

    def named(self, name: str) -> list[FunctionDef]:
        return self._by_name.get(name, [])

    def scope_of(self, f: FunctionDef, qualifier: str | None = None) -> ScopeResult:
        case = case_of(f)
        external = case in (ScopeCase.GLOBAL, ScopeCase.ROOT_SCOPED)
        return ScopeResult(
            case, self.region(f), external, qualifier if case is ScopeCase.ROOT_SCOPED else None
        )

    def callable_from(self, system: BlockPath) -> list[FunctionDef]:
        return [f for f in self.functions if system in self._regions[f.path]]


def case_of(f: FunctionDef) -> ScopeCase:
    if f.visibility is Visibility.GLOBAL:
        return ScopeCase.GLOBAL
    return {
        Placement.ROOT: ScopeCase.ROOT_SCOPED,
        Placement.VIRTUAL: ScopeCase.VIRTUAL,
        Placement.NONVIRTUAL: ScopeCase.NONVIRTUAL,
    }[f.placement]


def scope_of(f: FunctionDef, model: ModelFile, qualifier: str | None = None) -> ScopeResult:
    return FunctionTable(model).scope_of(f, qualifier)


def _import_tables(imports) -> dict[str, FunctionTable]:
    if not imports:
        return {}
    items = imports.items() if isinstance(imports, Mapping) else imports
    return {ref: (m if isinstance(m, FunctionTable) else FunctionTable(m)) for ref, m in items}


def _nearness(f: FunctionDef, caller_system: BlockPath) -> float:
    if f.parent_system.contains(caller_system):
        return caller_system.depth - f.parent_system.depth
    return math.inf


def resolve_call(call: CallSite, model: "ModelFile | FunctionTable", imports=None) -> FunctionDef:
    """The definition a caller binds to; innermost definition wins among equals."""
    table = model if isinstance(model, FunctionTable) else FunctionTable(model)
    tables = _import_tables(imports)
    caller_system = call.path.parent
    name = call.called_name

    if call.qualifier is not None:
        ref, fname = call.qualifier, call.base_name
        imported = tables.get(ref)
        if imported is None:
            raise UnknownFunction(name, call.path)
        named = imported.named(fname)
        if not named:
            raise UnknownFunction(name, call.path)
        visible = [f for f in named if f.externally_visible]
        if not visible:
            raise OutOfScope(name, call.path, min(f.path for f in named))
        matching = [f for f in visible if f.signature.compatible(call.signature)]
        if not matching:
            raise SignatureMismatch(visible[0].signature, call.signature)
        if len(matching) > 1:
            raise AmbiguousCall(name, [f.path for f in matching])
        return matching[0]

    local = table.named(name)
    imported_globals = [
        f for t in tables.values() for f in t.named(name) if f.visibility is Visibility.GLOBAL
    ]
    if not local and not imported_globals:
        raise UnknownFunction(name, call.path)
    in_scope = [f for f in local if caller_system in table.region(f)]
    candidates = [(f, _nearness(f, caller_system)) for f in in_scope]
    candidates += [(f, math.inf) for f in imported_globals]
    if not candidates:
        nearest = min(local, key=lambda f: (_distance(f.parent_system, caller_system), f.path))
        raise OutOfScope(name, call.path, nearest.path)
    matching = [(f, d) for f, d in candidates if f.signature.compatible(call.signature)]
    if not matching:
        raise SignatureMismatch(candidates[0][0].signature, call.signature)
    best = min(d for _, d in matching)
    winners = [f for f, d in matching if d == best]
    if len(winners) > 1:
        raise AmbiguousCall(name, sorted(f.path for f in winners))
    return winners[0]


def _distance(a: BlockPath, b: BlockPath) -> int:
    """Tree distance between two system paths."""
    common = 0
    for x, y in zip(a.segments, b.segments):
        if x != y:
            break
        common += 1
    return (a.depth - common) + (b.depth - common)


def detect_shadowing(model: "ModelFile | FunctionTable") -> list[tuple[FunctionDef, FunctionDef]]:
    table = model if isinstance(model, FunctionTable) else FunctionTable(model)
    pairs = []
    for group in table._by_name.values():
        ordered = sorted(group, key=lambda f: f.path)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                if a.signature.compatible(b.signature) and not table.region(a).isdisjoint(table.region(b)):
                    pairs.append((a, b))
    pairs.sort(key=lambda ab: (ab[0].path, ab[1].path))
    return pairs


def list_callable(at: "BlockPath | str", model: "ModelFile | FunctionTable", imports=None) -> list[tuple[str, FunctionDef]]:
    table = model if isinstance(model, FunctionTable) else FunctionTable(model)
    at = as_path(at)
    table.model.system(at)
    entries = [(f.function_name, f) for f in table.callable_from(at)]
    for ref, imported in _import_tables(imports).items():
        entries += [(f"{ref}.{f.function_name}", f) for f in imported.functions if f.externally_visible]
    entries.sort(key=lambda e: (e[0], e[1].path))
    return entries


def format_prototype(name: str, signature: FunctionSignature) -> str:
    """``"[y1,y2] = f(u1,u2)"``, ``"y = f(u)"`` or ``"f(u)"``."""
    ins = ",".join(a.name for a in signature.inputs)
    outs = [a.name for a in signature.outputs]
    call = f"{name}({ins})"
    if not outs:
        return call
    if len(outs) == 1:
        return f"{outs[0]} = {call}"
    return f"[{','.join(outs)}] = {call}"


def format_arg_specs(args: Iterable[Arg]) -> str:
    """``"uint16(1),double(-1)"``; undeclared types fall back to ``double``."""
    return ",".join(
        f"{'double' if a.data_type in WILDCARD_TYPES else a.data_type}({a.dimensions})" for a in args
    )
