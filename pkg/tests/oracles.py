"""Brute-force reference implementations used to cross-check the library.

These walk the raw block tree themselves and share no logic with
``slm.scope``, ``slm.metrics`` or ``slm.interface``.
"""

from __future__ import annotations

import copy
import itertools

from slm.model import Block, ModelFile, System


def _on(block: Block, key: str) -> bool:
    v = block.params.get(key)
    return isinstance(v, str) and v.lower() == "on"


def _is_function(block: Block) -> bool:
    if block.block_type != "Subsystem" or block.inner is None:
        return False
    return any(b.block_type == "TriggerPort" and not b.commented and _on(b, "IsSimulinkFunction") for b in block.inner.blocks)


def walk(model: ModelFile):
    """(segments tuple, block, chain of enclosing blocks) for every live block."""
    out = []

    def rec(system: System, prefix: tuple, chain: tuple):
        for b in system.blocks:
            if b.commented:
                continue
            here = prefix + (b.name,)
            out.append((here, b, chain))
            if b.inner is not None:
                rec(b.inner, here, chain + (b,))

    rec(model.root, (model.name,), ())
    return out


def system_paths(model: ModelFile) -> list[tuple]:
    return [(model.name,)] + [p for p, b, _ in walk(model) if b.inner is not None]


def accessible(model: ModelFile, fn_path: tuple, caller_system: tuple) -> bool:
    """Can a caller living in ``caller_system`` reach the function at ``fn_path``?"""
    found = {p: (b, chain) for p, b, chain in walk(model)}
    block, chain = found[fn_path]
    trigger = next(b for b in block.inner.blocks if b.block_type == "TriggerPort" and _on(b, "IsSimulinkFunction"))
    if str(trigger.params.get("FunctionVisibility", "scoped")).lower() == "global":
        return True
    parent = fn_path[:-1]
    if len(parent) == 1:
        return True
    enclosed_by_unit = any(_on(b, "TreatAsAtomicUnit") or _is_function(b) for b in chain)
    if enclosed_by_unit:
        return caller_system == parent
    return caller_system[: len(parent)] == parent


def lca(systems: list[tuple]) -> tuple:
    """Deepest tuple that is an ancestor-or-self of all ``systems``, by enumeration."""
    candidates = set()
    for s in systems:
        candidates |= {s[:k] for k in range(1, len(s) + 1)}
    common = [c for c in candidates if all(s[: len(c)] == c for s in systems)]
    return max(common, key=len)


# --- complexity ---------------------------------------------------------------


def inline_links(model: ModelFile, libs: list[ModelFile]) -> ModelFile:
    """Copy of ``model`` with every library link replaced by a copy of its target."""
    by_name = {lib.name: lib for lib in libs}

    def target(source: str) -> Block:
        lib_name, *rest = source.split("/")
        system = by_name[lib_name].root
        block = None
        for seg in rest:
            block = next(b for b in system.blocks if b.name == seg)
            system = block.inner
        return block

    def rec(system: System):
        for i, b in enumerate(system.blocks):
            while b.block_type == "LibraryLink":
                t = copy.deepcopy(target(b.params["SourceBlock"]))
                t.name, t.position, t.commented = b.name, b.position, b.commented or t.commented
                system.blocks[i] = b = t
            if b.inner is not None:
                rec(b.inner)

    out = copy.deepcopy(model)
    rec(out.root)
    return out


def cc_oracle(model: ModelFile) -> int:
    """Complexity of a link-free model by direct counting."""
    extra, decisions = 0, 0
    for _, b, _ in walk(model):
        t = b.block_type
        if t == "Switch":
            decisions += 1
            extra += 1
        elif t == "If":
            elseifs = [s for s in str(b.params.get("ElseIfExpressions", "")).split(",") if s.strip()]
            has_else = str(b.params.get("ShowElse", "on")).lower() == "on"
            decisions += 1
            extra += len(elseifs) + (1 if has_else else 0)
        elif t == "MultiPortSwitch":
            decisions += 1
            extra += int(b.params.get("Inputs", 3)) - 1
        elif t == "Subsystem" and (_on(b, "TreatAsAtomicUnit") or _is_function(b)):
            extra += 1
    return (1 if decisions else 0) + extra


# --- interface ------------------------------------------------------------------


def root_ports(model: ModelFile, block_type: str) -> list[str]:
    return ["/".join(p) for p, b, _ in walk(model) if b.block_type == block_type and len(p) == 2]


def export_sets(model: ModelFile) -> set[str]:
    """FG | (FS - FL), each set built separately."""
    fd = [(p, b) for p, b, _ in walk(model) if _is_function(b)]

    def vis(b):
        t = next(x for x in b.inner.blocks if x.block_type == "TriggerPort" and _on(x, "IsSimulinkFunction"))
        return str(t.params.get("FunctionVisibility", "scoped")).lower()

    fg = {p for p, b in fd if vis(b) == "global"}
    fs = {p for p, b in fd if vis(b) != "global"}
    fl = {p for p in fs if len(p) > 2}
    return {"/".join(p) for p in fg | (fs - fl)}


def all_pairs(xs):
    return itertools.combinations(xs, 2)
