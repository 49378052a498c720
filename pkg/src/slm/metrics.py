"""Cyclomatic complexity, interface complexity and inter-file interaction counts.

Cyclomatic complexity follows the block-diagram adaptation::

    CC = base + sum(outcomes - 1 for each decision block) + number of atomic units

where ``base`` is 1 if the model has at least one decision block and 0
otherwise.  Atomic units are subsystems with ``TreatAsAtomicUnit "on"`` and
function definitions.  Library links are expanded in place, so a linked
subsystem is counted once per link, while a function body is counted once no
matter how many callers it has.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from slm.errors import UnresolvedLibraryLink
from slm.interface import ALL_CATEGORIES, ModuleInterface, global_store_accesses, resolve_store
from slm.model import Block, BlockKind, BlockPath, ModelFile, ModelKind, System
from slm.parser import DictionaryFile
from slm.scope import collect_call_sites, is_nonvirtual

OutcomeRule = Callable[[Block], int]


def _int_param(block: Block, key: str, default: int) -> int:
    value = block.param(key, default)
    try:
        return int(value)
    except (TypeError, ValueError):
        return default


def _if_outcomes(block: Block) -> int:
    elseifs = [s for s in str(block.param("ElseIfExpressions", "")).split(",") if s.strip()]
    show_else = str(block.param("ShowElse", "on")).lower() == "on"
    return 1 + len(elseifs) + (1 if show_else else 0)


DEFAULT_OUTCOMES: dict[str, OutcomeRule] = {
    BlockKind.SWITCH.value: lambda b: 2,
    BlockKind.IF.value: _if_outcomes,
    BlockKind.MULTIPORT_SWITCH.value: lambda b: _int_param(b, "Inputs", 3),
}


@dataclass
class ComplexityReport:
    total: int = 0
    per_system: dict = field(default_factory=dict)
    decision_objects: list = field(default_factory=list)
    atomic_units: list = field(default_factory=list)

    @property
    def base(self) -> int:
        return 1 if self.decision_objects else 0

    def contribution(self, system: BlockPath) -> int:
        """Complexity added by ``system`` and everything below it, excluding the base."""
        return sum(v for s, v in self.per_system.items() if system.contains(s))

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "base": self.base,
            "perSystem": {str(k): v for k, v in sorted(self.per_system.items())},
            "decisionObjects": [{"path": str(p), "outcomes": n} for p, n in self.decision_objects],
            "atomicUnits": [str(p) for p in self.atomic_units],
        }


class _LibraryIndex:
    def __init__(self, libs: Sequence[ModelFile]):
        self.by_name = {lib.name: lib for lib in libs}

    def resolve(self, source: str) -> Block:
        lib_name, _, rest = source.partition("/")
        lib = self.by_name.get(lib_name)
        if lib is None or not rest:
            raise UnresolvedLibraryLink(source)
        try:
            return lib.find(f"{lib_name}/{rest}")
        except Exception:
            raise UnresolvedLibraryLink(source) from None


def cyclomatic_complexity(
    model: ModelFile,
    libs: Sequence[ModelFile] = (),
    outcome_rules: Mapping[str, OutcomeRule] | None = None,
) -> ComplexityReport:
    rules = dict(DEFAULT_OUTCOMES if outcome_rules is None else outcome_rules)
    index = _LibraryIndex(libs)
    report = ComplexityReport()

    def walk(system: System, sys_path: BlockPath, links: tuple[str, ...]) -> None:
        score = report.per_system.setdefault(sys_path, 0)
        for block in system.blocks:
            if block.commented:
                continue
            path = sys_path.child(block.name)
            effective, chain = block, links
            while effective.kind is BlockKind.LIBRARY_LINK:
                source = str(effective.param("SourceBlock", ""))
                if source in chain:
                    raise UnresolvedLibraryLink(f"{source} (cyclic link)")
                chain = chain + (source,)
                effective = index.resolve(source)
                if effective.commented:
                    break
            if effective.commented:
                continue
            rule = rules.get(effective.block_type)
            if rule is not None:
                outcomes = rule(effective)
                report.decision_objects.append((path, outcomes))
                score += outcomes - 1
            if effective.kind is BlockKind.SUBSYSTEM and effective.inner is not None:
                if is_nonvirtual(effective):
                    report.atomic_units.append(path)
                    score += 1
                report.per_system[sys_path] = score
                walk(effective.inner, path, chain)
        report.per_system[sys_path] = score

    walk(model.root, model.root_path, ())
    report.total = report.base + sum(report.per_system.values())
    return report


def interface_complexity(interface: ModuleInterface) -> dict[str, int]:
    counts = {c.value: len(interface.of(c)) for c in ALL_CATEGORIES}
    counts["total"] = len(interface.entries)
    return counts


UNRESOLVED = "<unresolved>"


@dataclass
class InteractionReport:
    library_link_count: int = 0
    library_links: dict = field(default_factory=dict)
    exported_blocks: dict = field(default_factory=dict)
    model_reference_count: int = 0
    external_call_count: int = 0
    shared_data_store_count: int = 0
    per_peer: dict = field(default_factory=dict)

    @property
    def exported_block_count(self) -> int:
        return sum(self.exported_blocks.values())

    @property
    def total(self) -> int:
        return sum(self.per_peer.values())

    def to_json(self) -> dict:
        return {
            "libraryLinkCount": self.library_link_count,
            "libraryLinks": dict(sorted(self.library_links.items())),
            "exportedBlockCount": self.exported_block_count,
            "exportedBlocks": dict(sorted(self.exported_blocks.items())),
            "modelReferenceCount": self.model_reference_count,
            "externalCallCount": self.external_call_count,
            "sharedDataStoreCount": self.shared_data_store_count,
            "perPeer": dict(sorted(self.per_peer.items())),
            "total": self.total,
        }


def exported_block_count(library: ModelFile) -> int:
    return sum(1 for b in library.root.blocks if not b.commented)


def interactions(
    model: ModelFile, peers: Sequence[ModelFile] = (), dicts: Sequence[DictionaryFile] = ()
) -> InteractionReport:
    known = {p.name: p for p in peers}
    report = InteractionReport()
    per_peer: Counter = Counter()

    def peer_of(name: str) -> str:
        return name if name in known else UNRESOLVED

    refs_by_block: dict[str, str] = {}
    for path, b in model.iter_blocks():
        if b.kind is BlockKind.LIBRARY_LINK:
            lib = str(b.param("SourceBlock", "")).partition("/")[0]
            peer = peer_of(lib)
            report.library_link_count += 1
            report.library_links[peer] = report.library_links.get(peer, 0) + 1
            per_peer[peer] += 1
        elif b.kind is BlockKind.MODEL_REFERENCE:
            ref = str(b.param("ModelName", ""))
            refs_by_block.setdefault(b.name, ref)
            report.model_reference_count += 1
            per_peer[peer_of(ref)] += 1

    for lib_name in report.library_links:
        lib = known.get(lib_name)
        if lib is not None and lib.kind is ModelKind.LIBRARY:
            report.exported_blocks[lib_name] = exported_block_count(lib)

    for call in collect_call_sites(model):
        if call.qualifier is None:
            continue
        report.external_call_count += 1
        per_peer[peer_of(refs_by_block.get(call.qualifier, ""))] += 1

    if dicts:
        def stores(m: ModelFile) -> set[str]:
            reads, writes = global_store_accesses(m)
            return set(reads) | set(writes)

        shared_dicts = set()
        for peer in peers:
            for s in stores(peer):
                source, _ = resolve_store(s, dicts)
                if source is not None:
                    shared_dicts.add(id(source))
        for s in sorted(stores(model)):
            source, _ = resolve_store(s, dicts)
            if source is not None and id(source) in shared_dicts:
                report.shared_data_store_count += 1
                per_peer[source.name] += 1

    report.per_peer = dict(per_peer)
    return report


def render_metrics_text(cc: ComplexityReport, icx: dict[str, int] | None = None, inter: InteractionReport | None = None) -> str:
    rows = [("cyclomatic complexity", cc.total), ("  base", cc.base)]
    rows.append(("  decision objects", len(cc.decision_objects)))
    rows.append(("  atomic units", len(cc.atomic_units)))
    if icx is not None:
        rows.append(("interface entries", icx["total"]))
        rows += [(f"  {k}", v) for k, v in icx.items() if k != "total" and v]
    if inter is not None:
        rows.append(("library links", inter.library_link_count))
        rows.append(("model references", inter.model_reference_count))
        rows.append(("external calls", inter.external_call_count))
        rows.append(("shared data stores", inter.shared_data_store_count))
        rows += [(f"  peer {k}", v) for k, v in sorted(inter.per_peer.items())]
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


def metrics_to_json(cc: ComplexityReport, icx: dict[str, int] | None = None, inter: InteractionReport | None = None) -> str:
    doc = {"cyclomaticComplexity": cc.to_json()}
    if icx is not None:
        doc["interfaceComplexity"] = icx
    if inter is not None:
        doc["interactions"] = inter.to_json()
    return json.dumps(doc, indent=2)
