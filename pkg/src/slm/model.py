"""In-memory representation of a block-diagram model.

A :class:`ModelFile` owns a root :class:`System`; each ``Subsystem`` block owns
an inner :class:`System`.  Blocks are addressed by :class:`BlockPath` values
whose first segment is the model name.  A system is addressed by the path of
the block that owns it, or by the one-segment path ``(model_name,)`` for the
root system.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from slm.errors import UnresolvedPath

ParamValue = Union[str, int, float, list]

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class BlockKind(str, Enum):
    INPORT = "Inport"
    OUTPORT = "Outport"
    SUBSYSTEM = "Subsystem"
    LIBRARY_LINK = "LibraryLink"
    MODEL_REFERENCE = "ModelReference"
    FUNCTION_CALLER = "FunctionCaller"
    TRIGGER_PORT = "TriggerPort"
    ARG_IN = "ArgIn"
    ARG_OUT = "ArgOut"
    DATA_STORE_MEMORY = "DataStoreMemory"
    DATA_STORE_READ = "DataStoreRead"
    DATA_STORE_WRITE = "DataStoreWrite"
    TO_FILE = "ToFile"
    FROM_FILE = "FromFile"
    FROM_SPREADSHEET = "FromSpreadsheet"
    TO_WORKSPACE = "ToWorkspace"
    FROM_WORKSPACE = "FromWorkspace"
    GOTO = "Goto"
    FROM = "From"
    SWITCH = "Switch"
    MULTIPORT_SWITCH = "MultiPortSwitch"
    IF = "If"
    OTHER = "Other"

    @classmethod
    def of(cls, block_type: str) -> "BlockKind":
        try:
            kind = cls(block_type)
        except ValueError:
            return cls.OTHER
        return cls.OTHER if kind is cls.OTHER else kind


class ModelKind(str, Enum):
    MODEL = "Model"
    LIBRARY = "Library"


def valid_name(name: str) -> bool:
    return bool(name) and not name.startswith("/") and not name.endswith("/")


@dataclass(frozen=True, order=True)
class BlockPath:
    """Slash-separated block address; a literal ``/`` inside a name renders as ``//``.

    Names may not start or end with ``/``: ``a///b`` would be ambiguous.
    """

    segments: tuple[str, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a block path needs at least one segment")
        if not isinstance(self.segments, tuple):
            object.__setattr__(self, "segments", tuple(self.segments))
        bad = [s for s in self.segments if not valid_name(s)]
        if bad:
            raise ValueError(f"invalid path segment {bad[0]!r}")

    @classmethod
    def of(cls, *segments: str) -> "BlockPath":
        return cls(tuple(segments))

    @classmethod
    def parse(cls, text: str) -> "BlockPath":
        segments: list[str] = []
        current: list[str] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "/":
                if i + 1 < len(text) and text[i + 1] == "/":
                    current.append("/")
                    i += 2
                    continue
                segments.append("".join(current))
                current = []
            else:
                current.append(ch)
            i += 1
        segments.append("".join(current))
        if any(s == "" for s in segments):
            raise ValueError(f"malformed block path {text!r}")
        return cls(tuple(segments))

    def __str__(self) -> str:
        return "/".join(s.replace("/", "//") for s in self.segments)

    @property
    def name(self) -> str:
        return self.segments[-1]

    @property
    def parent(self) -> "BlockPath | None":
        if len(self.segments) == 1:
            return None
        return BlockPath(self.segments[:-1])

    @property
    def depth(self) -> int:
        return len(self.segments)

    def child(self, name: str) -> "BlockPath":
        return BlockPath(self.segments + (name,))

    def contains(self, other: "BlockPath") -> bool:
        """True when ``other`` is this path or lies below it."""
        n = len(self.segments)
        return other.segments[:n] == self.segments

    def ancestors(self) -> Iterator["BlockPath"]:
        """Proper prefixes, innermost first."""
        for n in range(len(self.segments) - 1, 0, -1):
            yield BlockPath(self.segments[:n])


def as_path(path: "BlockPath | str") -> BlockPath:
    return path if isinstance(path, BlockPath) else BlockPath.parse(path)


@dataclass
class SignalLine:
    src_block: str
    src_port: int
    dst_block: str
    dst_port: int
    params: dict[str, ParamValue] = field(default_factory=dict)

    def touches(self, block_name: str) -> bool:
        return self.src_block == block_name or self.dst_block == block_name


@dataclass
class Block:
    name: str
    block_type: str
    params: dict[str, ParamValue] = field(default_factory=dict)
    position: tuple[int, int, int, int] | None = None
    commented: bool = False
    inner: "System | None" = None

    @property
    def kind(self) -> BlockKind:
        return BlockKind.of(self.block_type)

    def param(self, key: str, default=None):
        return self.params.get(key, default)

    def flag(self, key: str) -> bool:
        value = self.params.get(key)
        return isinstance(value, str) and value.lower() == "on"


@dataclass
class System:
    blocks: list[Block] = field(default_factory=list)
    lines: list[SignalLine] = field(default_factory=list)

    def block(self, name: str) -> Block | None:
        for b in self.blocks:
            if b.name == name:
                return b
        return None

    def names(self) -> set[str]:
        return {b.name for b in self.blocks}


@dataclass
class ModelFile:
    name: str
    root: System = field(default_factory=System)
    kind: ModelKind = ModelKind.MODEL
    params: dict[str, ParamValue] = field(default_factory=dict)
    source_path: str | None = field(default=None, compare=False)

    @property
    def root_path(self) -> BlockPath:
        return BlockPath((self.name,))

    def find(self, path: "BlockPath | str") -> Block:
        path = as_path(path)
        if path.segments[0] != self.name or len(path.segments) < 2:
            raise UnresolvedPath(path)
        system = self.root
        block = None
        for seg in path.segments[1:]:
            if system is None:
                raise UnresolvedPath(path)
            block = system.block(seg)
            if block is None:
                raise UnresolvedPath(path)
            system = block.inner
        return block

    def system(self, path: "BlockPath | str") -> System:
        """The system addressed by ``path`` (the root, or a subsystem's inner system)."""
        path = as_path(path)
        if path == self.root_path:
            return self.root
        block = self.find(path)
        if block.inner is None:
            raise UnresolvedPath(path)
        return block.inner

    def iter_blocks(self, include_commented: bool = False) -> Iterator[tuple[BlockPath, Block]]:
        """Depth-first, document-order walk; commented blocks hide their contents."""
        stack: list[tuple[BlockPath, Iterator[Block]]] = [(self.root_path, iter(self.root.blocks))]
        while stack:
            base, it = stack[-1]
            block = next(it, None)
            if block is None:
                stack.pop()
                continue
            if block.commented and not include_commented:
                continue
            path = base.child(block.name)
            yield path, block
            if block.inner is not None:
                stack.append((path, iter(block.inner.blocks)))

    def iter_systems(self, include_commented: bool = False) -> Iterator[tuple[BlockPath, System]]:
        yield self.root_path, self.root
        for path, block in self.iter_blocks(include_commented):
            if block.inner is not None:
                yield path, block.inner


def parent_of(path: "BlockPath | str", model: ModelFile) -> System | None:
    """System directly containing the block; ``None`` for the root system itself."""
    path = as_path(path)
    if path == model.root_path:
        return None
    model.find(path)
    return model.system(path.parent)


def at_root(path: "BlockPath | str", model: ModelFile) -> bool:
    path = as_path(path)
    model.find(path)
    return len(path.segments) == 2


def all_blocks(model: ModelFile, include_commented: bool = False) -> list[BlockPath]:
    return [p for p, _ in model.iter_blocks(include_commented)]


def unique_name(system: System, base: str) -> str:
    """``base`` if free in ``system``, else ``base_2``, ``base_3``, ..."""
    taken = system.names()
    if base not in taken:
        return base
    k = 2
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"
