"""Model transformations: scope conversion, caller synthesis, subsystem wrapping.

Every transformation works on a deep copy and either returns a complete
result or raises; the input model is never modified.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from slm.errors import (
    ConnectedFunction,
    NameCollision,
    NotInScope,
    NotVirtual,
    RefactorError,
    ResolutionError,
    WouldBreakCallers,
)
from slm.guidelines import intra_model_callers
from slm.model import Block, BlockKind, BlockPath, ModelFile, as_path, unique_name
from slm.scope import (
    FunctionDef,
    FunctionTable,
    Visibility,
    _nearness,
    collect_call_sites,
    format_arg_specs,
    format_prototype,
    function_trigger,
    is_nonvirtual,
    list_callable,
    resolve_call,
)


@dataclass(frozen=True)
class Global:
    pass


@dataclass(frozen=True)
class ExportedScoped:
    pass


@dataclass(frozen=True)
class InternalAt:
    system: BlockPath


ScopeTarget = Global | ExportedScoped | InternalAt


def parse_target(text: str) -> ScopeTarget:
    """``global``, ``exported`` or ``subsystem:PATH``."""
    key, _, rest = text.partition(":")
    key = key.strip().lower()
    if key == "global" and not rest:
        return Global()
    if key == "exported" and not rest:
        return ExportedScoped()
    if key == "subsystem" and rest:
        return InternalAt(BlockPath.parse(rest))
    raise ValueError(f"bad scope target {text!r}; use global, exported or subsystem:PATH")


@dataclass
class RefactorResult:
    model: ModelFile
    added: list = field(default_factory=list)
    removed: list = field(default_factory=list)
    moved: list = field(default_factory=list)
    modified: list = field(default_factory=list)
    worklist: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "added": [str(p) for p in self.added],
            "removed": [str(p) for p in self.removed],
            "moved": [{"from": str(a), "to": str(b)} for a, b in self.moved],
            "modified": [str(p) for p in self.modified],
            "worklist": list(self.worklist),
        }


def _rebase(path: BlockPath, old: BlockPath, new: BlockPath) -> BlockPath:
    if old.contains(path):
        return BlockPath(new.segments + path.segments[len(old.segments):])
    return path


def convert_scope(model: ModelFile, f: FunctionDef, target: ScopeTarget) -> RefactorResult:
    out = copy.deepcopy(model)
    block = out.find(f.path)
    trigger = function_trigger(block, f.path)
    if trigger is None:
        raise RefactorError(f"{f.path} is not a function definition")

    visibility = Visibility.GLOBAL if isinstance(target, Global) else Visibility.SCOPED
    if isinstance(target, Global):
        destination = f.parent_system
    elif isinstance(target, ExportedScoped):
        destination = out.root_path
    else:
        destination = as_path(target.system)

    result = RefactorResult(out)
    if f.visibility is not visibility:
        trigger.params["FunctionVisibility"] = visibility.value
        result.modified.append(f.path)

    new_path = f.path
    if destination != f.parent_system:
        if f.path.contains(destination):
            raise RefactorError(f"cannot move {f.path} into itself")
        target_system = out.system(destination)
        source_system = out.system(f.parent_system)
        if any(line.touches(block.name) for line in source_system.lines):
            raise ConnectedFunction(f.path)
        if block.name in target_system.names():
            raise NameCollision(destination, block.name)
        table = FunctionTable(model)
        if any(g.parent_system == destination for g in table.named(f.function_name)):
            raise NameCollision(destination, f.function_name)
        source_system.blocks.remove(block)
        target_system.blocks.append(block)
        new_path = destination.child(block.name)
        result.moved.append((f.path, new_path))

    if not result.modified and not result.moved:
        return result

    broken = []
    callers = intra_model_callers(FunctionTable(model))[f.path]
    new_table = FunctionTable(out)
    for caller in callers:
        caller_now = _rebase(caller, f.path, new_path)
        call = next(c for c in collect_call_sites(out) if c.path == caller_now)
        try:
            bound = resolve_call(call, new_table)
        except ResolutionError:
            broken.append(caller)
            continue
        if bound.path != new_path:
            broken.append(caller)
    if broken:
        raise WouldBreakCallers(sorted(broken))
    return result


def _pick(entries: list[tuple[str, FunctionDef]], at: BlockPath) -> FunctionDef:
    # same display name visible twice: innermost definition wins, as in resolution
    return min(entries, key=lambda e: (_nearness(e[1], at), e[1].path))[1]


def _below_lowest(system) -> tuple[int, int, int, int]:
    placed = [b.position for b in system.blocks if b.position is not None]
    if not placed:
        return (100, 100, 220, 140)
    left = min(p[0] for p in placed)
    bottom = max(p[3] for p in placed)
    return (left, bottom + 40, left + 120, bottom + 80)


def create_caller(model: ModelFile, at: BlockPath | str, target: str, imports=None) -> RefactorResult:
    at = as_path(at)
    entries = [e for e in list_callable(at, model, imports) if e[0] == target]
    if not entries:
        raise NotInScope(target, at)
    f = _pick(entries, at)
    out = copy.deepcopy(model)
    system = out.system(at)
    base = target.rsplit(".", 1)[-1]
    name = unique_name(system, f"Call_{base}")
    block = Block(
        name,
        BlockKind.FUNCTION_CALLER.value,
        {
            "Prototype": format_prototype(target, f.signature),
            "InputArgumentSpecifications": format_arg_specs(f.signature.inputs),
            "OutputArgumentSpecifications": format_arg_specs(f.signature.outputs),
        },
        position=_below_lowest(system),
    )
    system.blocks.append(block)
    return RefactorResult(out, added=[at.child(name)])


def wrap_subsystem_as_function(model: ModelFile, s: BlockPath | str, name: str) -> RefactorResult:
    s = as_path(s)
    out = copy.deepcopy(model)
    block = out.find(s)
    if block.kind is not BlockKind.SUBSYSTEM or block.inner is None or is_nonvirtual(block):
        raise NotVirtual(s)
    table = FunctionTable(model)
    if any(s.parent in table.region(g) for g in table.named(name)):
        raise NameCollision(s.parent, name)

    result = RefactorResult(out, modified=[s])
    inner = block.inner
    for b in inner.blocks:
        if b.commented:
            continue
        if b.kind is BlockKind.INPORT:
            b.block_type = BlockKind.ARG_IN.value
            result.modified.append(s.child(b.name))
        elif b.kind is BlockKind.OUTPORT:
            b.block_type = BlockKind.ARG_OUT.value
            result.modified.append(s.child(b.name))
    trigger_name = unique_name(inner, "function")
    inner.blocks.append(
        Block(
            trigger_name,
            BlockKind.TRIGGER_PORT.value,
            {"IsSimulinkFunction": "on", "FunctionName": name, "FunctionVisibility": Visibility.SCOPED.value},
        )
    )
    result.added.append(s.child(trigger_name))

    parent = out.system(s.parent)
    kept = []
    for line in parent.lines:
        if line.touches(block.name):
            result.worklist.append(
                f"rewire {s.parent}: {line.src_block}:{line.src_port} -> {line.dst_block}:{line.dst_port} via a caller of {name}"
            )
        else:
            kept.append(line)
    parent.lines = kept
    return result
