"""Syntactic module interface: extraction, rendering and the in-model pattern.

The interface of a model is the triple (inputs, outputs, exports):

* inputs: root-level Inports, every From File / From Spreadsheet /
  From Workspace block, and global data stores that are read;
* outputs: root-level Outports, every To File / To Workspace block, and
  global data stores that are written;
* exports: global functions plus scoped functions placed at the root.

A data store is global when no ``DataStoreMemory`` of that name exists in the
accessing block's system or any system above it, and a dictionary declares it.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from slm.errors import UnresolvedDataStore
from slm.model import Block, BlockKind, BlockPath, ModelFile, System, unique_name
from slm.parser import DictionaryFile
from slm.scope import FunctionSignature, Visibility, collect_functions, format_arg_specs, format_prototype, param_text

PATTERN_FLAG = "SLMInterfacePattern"


class Category(str, Enum):
    INPORT = "Inport"
    FROM_FILE = "FromFile"
    FROM_SPREADSHEET = "FromSpreadsheet"
    FROM_WORKSPACE = "FromWorkspace"
    DATA_STORE_READ = "DataStoreRead"
    OUTPORT = "Outport"
    TO_FILE = "ToFile"
    TO_WORKSPACE = "ToWorkspace"
    DATA_STORE_WRITE = "DataStoreWrite"
    EXPORTED_FUNCTION = "ExportedFunction"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def json_key(self) -> str:
        return _JSON_KEYS[self]


_LABELS = {
    Category.INPORT: "Inports:",
    Category.FROM_FILE: "From Files:",
    Category.FROM_SPREADSHEET: "From Spreadsheets:",
    Category.FROM_WORKSPACE: "From Workspaces:",
    Category.DATA_STORE_READ: "Data Store Reads:",
    Category.OUTPORT: "Outports:",
    Category.TO_FILE: "To Files:",
    Category.TO_WORKSPACE: "To Workspaces:",
    Category.DATA_STORE_WRITE: "Data Store Writes:",
    Category.EXPORTED_FUNCTION: "Simulink Functions:",
}
_JSON_KEYS = {
    Category.INPORT: "inports",
    Category.FROM_FILE: "fromFiles",
    Category.FROM_SPREADSHEET: "fromSpreadsheets",
    Category.FROM_WORKSPACE: "fromWorkspaces",
    Category.DATA_STORE_READ: "dataStoreReads",
    Category.OUTPORT: "outports",
    Category.TO_FILE: "toFiles",
    Category.TO_WORKSPACE: "toWorkspaces",
    Category.DATA_STORE_WRITE: "dataStoreWrites",
    Category.EXPORTED_FUNCTION: "exports",
}

INPUT_CATEGORIES = (
    Category.INPORT,
    Category.FROM_FILE,
    Category.FROM_SPREADSHEET,
    Category.FROM_WORKSPACE,
    Category.DATA_STORE_READ,
)
OUTPUT_CATEGORIES = (
    Category.OUTPORT,
    Category.TO_FILE,
    Category.TO_WORKSPACE,
    Category.DATA_STORE_WRITE,
)
ALL_CATEGORIES = INPUT_CATEGORIES + OUTPUT_CATEGORIES + (Category.EXPORTED_FUNCTION,)

# block kinds listed on the interface wherever they sit
_ANYWHERE = {
    BlockKind.FROM_FILE: Category.FROM_FILE,
    BlockKind.FROM_SPREADSHEET: Category.FROM_SPREADSHEET,
    BlockKind.FROM_WORKSPACE: Category.FROM_WORKSPACE,
    BlockKind.TO_FILE: Category.TO_FILE,
    BlockKind.TO_WORKSPACE: Category.TO_WORKSPACE,
}


@dataclass(frozen=True)
class InterfaceEntry:
    path: BlockPath
    category: Category
    data_type: str = "Inherit: auto"
    dimensions: str = "-1"
    sample_time: str = "-1"
    signature: FunctionSignature | None = None
    name: str | None = None
    accessors: tuple[BlockPath, ...] = ()

    def __post_init__(self):
        if (self.signature is not None) != (self.category is Category.EXPORTED_FUNCTION):
            raise ValueError("signature is required for, and only for, exported functions")


@dataclass(frozen=True)
class ModuleInterface:
    entries: tuple[InterfaceEntry, ...] = ()

    def of(self, category: Category) -> list[InterfaceEntry]:
        return [e for e in self.entries if e.category is category]

    @property
    def inputs(self) -> dict[Category, list[InterfaceEntry]]:
        return {c: self.of(c) for c in INPUT_CATEGORIES}

    @property
    def outputs(self) -> dict[Category, list[InterfaceEntry]]:
        return {c: self.of(c) for c in OUTPUT_CATEGORIES}

    @property
    def exports(self) -> list[InterfaceEntry]:
        return self.of(Category.EXPORTED_FUNCTION)

    def __len__(self) -> int:
        return len(self.entries)


def _port_entry(path: BlockPath, block: Block, category: Category) -> InterfaceEntry:
    if category in (Category.TO_FILE, Category.TO_WORKSPACE):
        return InterfaceEntry(
            path,
            category,
            param_text(block.param("SaveFormat"), "Timeseries"),
            "N/A",
            param_text(block.param("SampleTime"), "-1"),
        )
    return InterfaceEntry(
        path,
        category,
        param_text(block.param("OutDataTypeStr"), "Inherit: auto"),
        param_text(block.param("PortDimensions"), "-1"),
        param_text(block.param("SampleTime"), "-1"),
    )


def store_name(block: Block) -> str:
    return str(block.param("DataStoreName", block.name))


def local_memories(model: ModelFile) -> set[tuple[BlockPath, str]]:
    """(system, store name) for every non-commented DataStoreMemory."""
    return {
        (path.parent, store_name(b))
        for path, b in model.iter_blocks()
        if b.kind is BlockKind.DATA_STORE_MEMORY
    }


def is_local_store(path: BlockPath, name: str, memories: set[tuple[BlockPath, str]]) -> bool:
    return any((system, name) in memories for system in path.ancestors())


def resolve_store(name: str, dicts: Sequence[DictionaryFile]):
    """First dictionary declaring ``name`` and its entry, or ``(None, None)``."""
    for d in dicts:
        entry = d.lookup(name)
        if entry is not None:
            return d, entry
    return None, None


def global_store_accesses(model: ModelFile) -> tuple[dict[str, list[BlockPath]], dict[str, list[BlockPath]]]:
    """Reads and writes of stores with no local memory, keyed by store name in document order."""
    memories = local_memories(model)
    reads: dict[str, list[BlockPath]] = {}
    writes: dict[str, list[BlockPath]] = {}
    for path, b in model.iter_blocks():
        if b.kind not in (BlockKind.DATA_STORE_READ, BlockKind.DATA_STORE_WRITE):
            continue
        name = store_name(b)
        if is_local_store(path, name, memories):
            continue
        target = reads if b.kind is BlockKind.DATA_STORE_READ else writes
        target.setdefault(name, []).append(path)
    return reads, writes


def extract_interface(model: ModelFile, dicts: Sequence[DictionaryFile] = ()) -> ModuleInterface:
    buckets: dict[Category, list[InterfaceEntry]] = {c: [] for c in ALL_CATEGORIES}
    for path, b in model.iter_blocks():
        kind = b.kind
        if kind is BlockKind.INPORT and len(path.segments) == 2:
            buckets[Category.INPORT].append(_port_entry(path, b, Category.INPORT))
        elif kind is BlockKind.OUTPORT and len(path.segments) == 2:
            buckets[Category.OUTPORT].append(_port_entry(path, b, Category.OUTPORT))
        elif kind in _ANYWHERE:
            buckets[_ANYWHERE[kind]].append(_port_entry(path, b, _ANYWHERE[kind]))

    reads, writes = global_store_accesses(model)
    for category, accesses in ((Category.DATA_STORE_READ, reads), (Category.DATA_STORE_WRITE, writes)):
        for name, paths in accesses.items():
            _, decl = resolve_store(name, dicts)
            if decl is None:
                raise UnresolvedDataStore(name, paths)
            data_type = "Inherit: auto" if decl.data_type == "auto" else decl.data_type
            buckets[category].append(
                InterfaceEntry(
                    paths[0],
                    category,
                    data_type,
                    param_text(decl.dimensions, "-1"),
                    param_text(decl.sample_time, "-1"),
                    name=name,
                    accessors=tuple(paths),
                )
            )

    for f in collect_functions(model):
        is_global = f.visibility is Visibility.GLOBAL
        is_local = f.visibility is Visibility.SCOPED and len(f.path.segments) != 2
        if is_global or not is_local:
            buckets[Category.EXPORTED_FUNCTION].append(
                InterfaceEntry(f.path, Category.EXPORTED_FUNCTION, "", "", "", f.signature, f.function_name)
            )
    return ModuleInterface(tuple(e for c in ALL_CATEGORIES for e in buckets[c]))


# --- rendering -----------------------------------------------------------------


def _arg_line(label: str, arg) -> str:
    return f"    {label:<4} {arg.data_type}, {arg.dimensions}, {arg.sample_time}"


def render_interface_text(interface: ModuleInterface) -> str:
    lines: list[str] = []
    sections = (("Inputs", INPUT_CATEGORIES), ("Outputs", OUTPUT_CATEGORIES), ("Exports", (Category.EXPORTED_FUNCTION,)))
    for title, categories in sections:
        if lines:
            lines.append("")
        lines += [title, "-" * len(title)]
        empty = True
        for category in categories:
            entries = interface.of(category)
            if not entries:
                continue
            empty = False
            lines.append(category.label)
            for e in entries:
                if category is Category.EXPORTED_FUNCTION:
                    lines.append(f"  {e.path}")
                    lines += [_arg_line("In:", a) for a in e.signature.inputs]
                    lines += [_arg_line("Out:", a) for a in e.signature.outputs]
                else:
                    lines.append(f"  {e.path}, {e.data_type}, {e.dimensions}, {e.sample_time}")
        if empty:
            lines.append("None")
    return "\n".join(lines) + "\n"


def _arg_json(a) -> dict:
    return {"name": a.name, "dataType": a.data_type, "dimensions": a.dimensions, "sampleTime": a.sample_time}


def interface_to_json(interface: ModuleInterface) -> dict:
    def entry(e: InterfaceEntry) -> dict:
        d = {"path": str(e.path), "dataType": e.data_type, "dimensions": e.dimensions, "sampleTime": e.sample_time}
        if e.accessors:
            d["accessors"] = [str(p) for p in e.accessors]
        return d

    return {
        "inputs": {c.json_key: [entry(e) for e in interface.of(c)] for c in INPUT_CATEGORIES},
        "outputs": {c.json_key: [entry(e) for e in interface.of(c)] for c in OUTPUT_CATEGORIES},
        "exports": [
            {
                "path": str(e.path),
                "name": e.name,
                "inArgs": [_arg_json(a) for a in e.signature.inputs],
                "outArgs": [_arg_json(a) for a in e.signature.outputs],
            }
            for e in interface.exports
        ],
    }


# --- design pattern ------------------------------------------------------------

_LABEL_SIZE = (160, 20)
_ENTRY_SIZE = (160, 30)
_GAP = 60


def _strip_pattern(system: System) -> None:
    removed = {b.name for b in system.blocks if b.flag(PATTERN_FLAG)}
    system.blocks = [b for b in system.blocks if b.name not in removed]
    system.lines = [ln for ln in system.lines if ln.src_block not in removed and ln.dst_block not in removed]
    for b in system.blocks:
        if b.inner is not None:
            _strip_pattern(b.inner)


def remove_interface_pattern(model: ModelFile) -> ModelFile:
    result = copy.deepcopy(model)
    _strip_pattern(result.root)
    return result


def _mirror_block(entry: InterfaceEntry, name: str, position) -> Block:
    params: dict = {PATTERN_FLAG: "on", "SLMInterfaceSource": str(entry.path)}
    if entry.category is Category.EXPORTED_FUNCTION:
        params["Prototype"] = format_prototype(entry.name, entry.signature)
        params["InputArgumentSpecifications"] = format_arg_specs(entry.signature.inputs)
        params["OutputArgumentSpecifications"] = format_arg_specs(entry.signature.outputs)
        block_type = BlockKind.FUNCTION_CALLER.value
    else:
        block_type = entry.category.value
        if entry.category in (Category.DATA_STORE_READ, Category.DATA_STORE_WRITE):
            params["DataStoreName"] = entry.name
        elif entry.category in (Category.TO_FILE, Category.TO_WORKSPACE):
            params["SaveFormat"] = entry.data_type
            params["SampleTime"] = entry.sample_time
        else:
            params["OutDataTypeStr"] = entry.data_type
            params["PortDimensions"] = entry.dimensions
            params["SampleTime"] = entry.sample_time
    return Block(name, block_type, params, position, commented=True)


def inject_interface_pattern(model: ModelFile, interface: ModuleInterface) -> ModelFile:
    """Copy of ``model`` with the interface drawn as commented blocks left of the root content."""
    result = remove_interface_pattern(model)
    root = result.root
    placed = [b.position for b in root.blocks if b.position is not None]
    left = min((p[0] for p in placed), default=0)
    top = min((p[1] for p in placed), default=0)
    x = left - _GAP - _ENTRY_SIZE[0]
    y = top
    added: list[Block] = []

    def add(block: Block):
        root.blocks.append(block)
        added.append(block)

    sections = (("Inputs", INPUT_CATEGORIES), ("Outputs", OUTPUT_CATEGORIES), ("Exports", (Category.EXPORTED_FUNCTION,)))
    for title, categories in sections:
        label = Block(
            unique_name(root, f"Interface {title}"),
            "Annotation",
            {PATTERN_FLAG: "on", "Text": title},
            (x, y, x + _LABEL_SIZE[0], y + _LABEL_SIZE[1]),
            commented=True,
        )
        add(label)
        y += _LABEL_SIZE[1] + 10
        for category in categories:
            for entry in interface.of(category):
                name = unique_name(root, f"{entry.path.name} [interface]")
                add(_mirror_block(entry, name, (x, y, x + _ENTRY_SIZE[0], y + _ENTRY_SIZE[1])))
                y += _ENTRY_SIZE[1] + 10
        y += 30
    return result


def pattern_blocks(model: ModelFile) -> list[BlockPath]:
    return [p for p, b in model.iter_blocks(include_commented=True) if b.flag(PATTERN_FLAG)]


def entry_count(interface: ModuleInterface, categories: Iterable[Category] = ALL_CATEGORIES) -> int:
    wanted = set(categories)
    return sum(1 for e in interface.entries if e.category in wanted)
