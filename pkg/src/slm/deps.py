"""Module dependencies: model references, library links and data dictionaries."""

from __future__ import annotations

import json
import logging
import os
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

from slm.model import BlockKind, ModelFile
from slm.parser import DictionaryFile, load_dictionary, load_model

log = logging.getLogger(__name__)


class DepKind(str, Enum):
    MODEL_REFERENCE = "ModelReference"
    LIBRARY_LINK = "LibraryLink"
    DICTIONARY = "Dictionary"


def _raw_dependencies(model: ModelFile) -> list[tuple[str, DepKind]]:
    """One item per referencing block, plus model-level dictionary params."""
    found = []
    for _, b in model.iter_blocks():
        if b.kind is BlockKind.MODEL_REFERENCE:
            name = str(b.param("ModelName", "")).strip()
            if name:
                found.append((name, DepKind.MODEL_REFERENCE))
        elif b.kind is BlockKind.LIBRARY_LINK:
            lib = str(b.param("SourceBlock", "")).partition("/")[0].strip()
            if lib:
                found.append((lib, DepKind.LIBRARY_LINK))
    for d in dictionary_params(model):
        found.append((d, DepKind.DICTIONARY))
    return found


def dictionary_params(model: ModelFile) -> list[str]:
    raw = model.params.get("DataDictionary")
    if not isinstance(raw, str):
        return []
    return [_stem(p) for p in raw.split(",") if p.strip()]


def _stem(name: str) -> str:
    name = name.strip()
    return name[:-4] if name.lower().endswith(".smd") else name


def collect_dependencies(model: ModelFile, dicts: Sequence[DictionaryFile] = ()) -> list[tuple[str, DepKind]]:
    out: list[tuple[str, DepKind]] = []
    for item in _raw_dependencies(model) + [(d.name, DepKind.DICTIONARY) for d in dicts]:
        if item not in out:
            out.append(item)
    return out


@dataclass
class DependencyGraph:
    nodes: dict = field(default_factory=dict)  # name -> resolved file path, or None
    edges: list = field(default_factory=list)  # (from, to, kind, count)
    warnings: list = field(default_factory=list)

    @property
    def unresolved(self) -> list[str]:
        return sorted(n for n, p in self.nodes.items() if p is None)

    def as_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        for a, b, kind, count in self.edges:
            g.add_edge(a, b, kind=kind.value, count=count)
        return g

    def cycles(self) -> list[list[str]]:
        simple = nx.DiGraph((a, b) for a, b, _, _ in self.edges)
        found = [sorted(c) for c in nx.simple_cycles(simple)]
        return sorted(found)

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"name": n, "path": p, "resolved": p is not None} for n, p in sorted(self.nodes.items())
            ],
            "edges": [
                {"from": a, "to": b, "kind": k.value, "count": c} for a, b, k, c in sorted(self.edges, key=_edge_key)
            ],
            "cycles": self.cycles(),
            "warnings": list(self.warnings),
        }

    def to_dot(self) -> str:
        lines = ["digraph dependencies {"]
        for n, p in sorted(self.nodes.items()):
            style = ' style="dashed"' if p is None else ""
            lines.append(f'  "{n}"{style};')
        for a, b, k, c in sorted(self.edges, key=_edge_key):
            label = k.value if c == 1 else f"{k.value} x{c}"
            lines.append(f'  "{a}" -> "{b}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = []
        for a, b, k, c in sorted(self.edges, key=_edge_key):
            out.append(f"{a} -> {b} ({k.value}, {c})")
        for n in self.unresolved:
            out.append(f"unresolved: {n}")
        for cyc in self.cycles():
            out.append("cycle: " + " -> ".join(cyc))
        return "".join(s + "\n" for s in out)


def _edge_key(e):
    a, b, k, c = e
    return (a, b, k.value, c)


def search_path_from_env(env: str | None = None) -> list[Path]:
    raw = os.environ.get("SLM_SEARCH_PATH", "") if env is None else env
    return [Path(p) for p in raw.split(os.pathsep) if p]


def locate(name: str, kind: DepKind, search_path: Sequence[Path]) -> tuple[Path | None, list[Path]]:
    """First hit for ``name`` in ``search_path``; also returns every hit found."""
    suffix = ".smd" if kind is DepKind.DICTIONARY else ".sml"
    hits: list[Path] = []
    for directory in search_path:
        directory = Path(directory)
        exact = directory / f"{name}{suffix}"
        if exact.is_file():
            hits.append(exact)
            continue
        if directory.is_dir():
            # file names on disk are often lower-cased
            target = f"{name}{suffix}".lower()
            hits += [p for p in sorted(directory.iterdir()) if p.name.lower() == target and p.is_file()]
    return (hits[0] if hits else None), hits


def _add_edges(graph: DependencyGraph, source: str, items: Iterable[tuple[str, DepKind]]) -> None:
    for (name, kind), count in Counter(items).items():
        if name != source:
            graph.edges.append((source, name, kind, count))


def resolve_closure(entry: str | Path, search_path: Sequence[str | Path] = ()) -> DependencyGraph:
    entry = Path(entry)
    dirs = [Path(d) for d in search_path] or [entry.parent]
    graph = DependencyGraph()
    root = load_model(entry)
    graph.nodes[root.name] = str(entry)

    queue = deque([root])
    seen = {root.name}
    while queue:
        model = queue.popleft()
        items = _raw_dependencies(model)
        _add_edges(graph, model.name, items)
        for name, kind in dict.fromkeys(items):
            if name in seen:
                continue
            seen.add(name)
            path, hits = locate(name, kind, dirs)
            if len(hits) > 1:
                msg = f"{name}: found in several search-path entries ({', '.join(map(str, hits))}); using {hits[0]}"
                graph.warnings.append(msg)
                log.warning(msg)
            graph.nodes[name] = str(path) if path else None
            if path is None:
                continue
            if kind is DepKind.DICTIONARY:
                load_dictionary(path)
            else:
                queue.append(load_model(path))
    return graph


def render_dependencies_text(deps: Sequence[tuple[str, DepKind]]) -> str:
    return "".join(f"{name} ({kind.value})\n" for name, kind in deps)


def dependencies_to_json(deps: Sequence[tuple[str, DepKind]]) -> str:
    return json.dumps([{"name": n, "kind": k.value} for n, k in deps], indent=2)
