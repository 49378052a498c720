"""Reader and writer for ``.sml`` model files and ``.smd`` dictionary files.

Model grammar::

    file      := ("Model" | "Library") "{" entry* "}"
    entry     := kv | "System" sysBody
    sysBody   := "{" (blockDecl | lineDecl)* "}"
    blockDecl := "Block" "{" (kv | "System" sysBody)* "}"
    lineDecl  := "Line" "{" kv* "}"
    kv        := Identifier (QuotedString | Number | "[" Number* "]")

Dictionary grammar::

    file  := ("Scope" QuotedString)? entry*
    entry := "DataStore" "{" kv* "}"

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from slm.errors import DuplicateEntry, LexError, LoadError, ParseError, ValidationError
from slm.model import (
    IDENTIFIER,
    Block,
    BlockKind,
    BlockPath,
    ModelFile,
    ModelKind,
    ParamValue,
    SignalLine,
    System,
    valid_name,
)

__all__ = [
    "DataStoreDecl",
    "DictionaryFile",
    "ScopeKind",
    "Token",
    "TokenKind",
    "lex",
    "load_dictionary",
    "load_model",
    "parse_dictionary",
    "parse_model",
    "read_model",
    "serialize_dictionary",
    "serialize_model",
]


class TokenKind(str, Enum):
    IDENTIFIER = "Identifier"
    STRING = "QuotedString"
    NUMBER = "Number"
    LBRACE = "{"
    RBRACE = "}"
    LBRACKET = "["
    RBRACKET = "]"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int
    value: ParamValue | None = None

    def describe(self) -> str:
        if self.kind is TokenKind.STRING:
            return f'"{self.text}"'
        if self.kind in (TokenKind.IDENTIFIER, TokenKind.NUMBER):
            return f"{self.kind.value} {self.text!r}"
        return repr(self.text)


_NUMBER = re.compile(r"-?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}
_PUNCT = {"{": TokenKind.LBRACE, "}": TokenKind.RBRACE, "[": TokenKind.LBRACKET, "]": TokenKind.RBRACKET}


def lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        col = i - line_start + 1
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, line, col))
            i += 1
            continue
        if ch == '"':
            chars: list[str] = []
            j = i + 1
            while True:
                if j >= n or text[j] == "\n":
                    raise LexError("unterminated string", line, col)
                c = text[j]
                if c == '"':
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        raise LexError("invalid escape sequence", line, j - line_start + 1)
                    chars.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                chars.append(c)
                j += 1
            s = "".join(chars)
            tokens.append(Token(TokenKind.STRING, s, line, col, s))
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            raw = m.group()
            value: int | float = int(raw) if re.fullmatch(r"-?\d+", raw) else float(raw)
            tokens.append(Token(TokenKind.NUMBER, raw, line, col, value))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(Token(TokenKind.IDENTIFIER, m.group(), line, col))
            i = m.end()
            continue
        raise LexError(f"illegal character {ch!r}", line, col)
    return tokens


# --- model parsing ---------------------------------------------------------


# (input ports, output ports) for kinds whose port counts are fixed
_FIXED_PORTS: dict[BlockKind, tuple[int, int]] = {
    BlockKind.INPORT: (0, 1),
    BlockKind.OUTPORT: (1, 0),
    BlockKind.ARG_IN: (0, 1),
    BlockKind.ARG_OUT: (1, 0),
    BlockKind.TRIGGER_PORT: (0, 0),
    BlockKind.DATA_STORE_MEMORY: (0, 0),
    BlockKind.DATA_STORE_READ: (0, 1),
    BlockKind.DATA_STORE_WRITE: (1, 0),
    BlockKind.TO_FILE: (1, 0),
    BlockKind.TO_WORKSPACE: (1, 0),
    BlockKind.FROM_FILE: (0, 1),
    BlockKind.FROM_SPREADSHEET: (0, 1),
    BlockKind.FROM_WORKSPACE: (0, 1),
    BlockKind.GOTO: (1, 0),
    BlockKind.FROM: (0, 1),
    BlockKind.SWITCH: (3, 1),
}


def port_counts(block: Block) -> tuple[int, int] | None:
    """Number of (input, output) ports, or ``None`` when not determinable."""
    kind = block.kind
    if kind is BlockKind.SUBSYSTEM and block.inner is not None:
        ins = sum(1 for b in block.inner.blocks if b.kind is BlockKind.INPORT)
        outs = sum(1 for b in block.inner.blocks if b.kind is BlockKind.OUTPORT)
        return ins, outs
    return _FIXED_PORTS.get(kind)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.where: dict[int, Token] = {}

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _fail(self, expected: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = (last.column + len(last.text)) if last else 1
            return ParseError(line, col, expected, "end of input")
        return ParseError(tok.line, tok.column, expected, tok.describe())

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind or (text is not None and tok.text != text):
            raise self._fail(repr(text) if text else kind.value)
        self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: str | None = None, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is kind and (text is None or tok.text == text)

    def value(self) -> ParamValue:
        tok = self.peek()
        if tok is not None and tok.kind in (TokenKind.STRING, TokenKind.NUMBER):
            self.pos += 1
            return tok.value
        if tok is not None and tok.kind is TokenKind.LBRACKET:
            self.pos += 1
            items = []
            while not self.at(TokenKind.RBRACKET):
                items.append(self.expect(TokenKind.NUMBER).value)
            self.pos += 1
            return items
        raise self._fail("value (string, number or list)")

    def kv(self, into: dict, owner: str) -> tuple[str, Token]:
        key_tok = self.expect(TokenKind.IDENTIFIER)
        if key_tok.text in into:
            raise ValidationError(owner, f"parameter {key_tok.text!r} given twice", key_tok.line, key_tok.column)
        into[key_tok.text] = self.value()
        return key_tok.text, key_tok

    def model(self) -> ModelFile:
        head = self.peek()
        if head is None or head.kind is not TokenKind.IDENTIFIER or head.text not in ("Model", "Library"):
            raise self._fail("'Model' or 'Library'")
        self.pos += 1
        kind = ModelKind(head.text)
        self.expect(TokenKind.LBRACE)
        params: dict[str, ParamValue] = {}
        root_tokens: list[Token] = []
        pending_root = None
        while not self.at(TokenKind.RBRACE):
            if self.at(TokenKind.IDENTIFIER, "System") and self.at(TokenKind.LBRACE, offset=1):
                tok = self.expect(TokenKind.IDENTIFIER)
                if pending_root is not None:
                    raise ValidationError("<model>", "more than one root System", tok.line, tok.column)
                root_tokens.append(tok)
                pending_root = self.system_body()
            else:
                self.kv(params, "<model>")
        self.expect(TokenKind.RBRACE)
        if self.peek() is not None:
            raise self._fail("end of input")
        name = params.pop("Name", None)
        if not isinstance(name, str) or not IDENTIFIER.match(name):
            raise ValidationError("<model>", f"model Name must be an identifier, got {name!r}", head.line, head.column)
        model = ModelFile(name=name, root=pending_root or System(), kind=kind, params=params)
        self.validate(model.root, model.root_path, is_root=True)
        return model

    def system_body(self) -> System:
        self.expect(TokenKind.LBRACE)
        system = System()
        while not self.at(TokenKind.RBRACE):
            if self.at(TokenKind.IDENTIFIER, "Block"):
                system.blocks.append(self.block())
            elif self.at(TokenKind.IDENTIFIER, "Line"):
                system.lines.append(self.line())
            else:
                raise self._fail("'Block', 'Line' or '}'")
        self.expect(TokenKind.RBRACE)
        return system

    def block(self) -> Block:
        start = self.expect(TokenKind.IDENTIFIER, "Block")
        self.expect(TokenKind.LBRACE)
        raw: dict[str, ParamValue] = {}
        inner = None
        while not self.at(TokenKind.RBRACE):
            if self.at(TokenKind.IDENTIFIER, "System") and self.at(TokenKind.LBRACE, offset=1):
                tok = self.expect(TokenKind.IDENTIFIER)
                if inner is not None:
                    raise ValidationError(str(raw.get("Name", "<block>")), "more than one System", tok.line, tok.column)
                inner = self.system_body()
            else:
                self.kv(raw, str(raw.get("Name", "<block>")))
        self.expect(TokenKind.RBRACE)
        name = raw.pop("Name", None)
        block_type = raw.pop("BlockType", None)
        if not isinstance(name, str) or not name:
            raise ValidationError("<block>", "block needs a string Name", start.line, start.column)
        if not valid_name(name):
            raise ValidationError(name, "block name cannot start or end with '/'", start.line, start.column)
        if not isinstance(block_type, str) or not block_type:
            raise ValidationError(name, "block needs a string BlockType", start.line, start.column)
        position = raw.pop("Position", None)
        if position is not None:
            if not (isinstance(position, list) and len(position) == 4 and all(isinstance(v, int) for v in position)):
                raise ValidationError(name, "Position must be four integers", start.line, start.column)
            position = tuple(position)
        commented = raw.pop("Commented", "off")
        if commented not in ("on", "off"):
            raise ValidationError(name, 'Commented must be "on" or "off"', start.line, start.column)
        block = Block(name, block_type, raw, position, commented == "on", inner)
        if block.kind is BlockKind.SUBSYSTEM and block.inner is None:
            block.inner = System()
        self.where[id(block)] = start
        return block

    def line(self) -> SignalLine:
        start = self.expect(TokenKind.IDENTIFIER, "Line")
        self.expect(TokenKind.LBRACE)
        raw: dict[str, ParamValue] = {}
        while not self.at(TokenKind.RBRACE):
            self.kv(raw, "<line>")
        self.expect(TokenKind.RBRACE)
        fields = {}
        for key, typ in (("SrcBlock", str), ("SrcPort", int), ("DstBlock", str), ("DstPort", int)):
            value = raw.pop(key, None)
            if not isinstance(value, typ) or (typ is int and value < 1):
                raise ValidationError("<line>", f"{key} missing or invalid", start.line, start.column)
            fields[key] = value
        line = SignalLine(fields["SrcBlock"], fields["SrcPort"], fields["DstBlock"], fields["DstPort"], raw)
        self.where[id(line)] = start
        return line

    def validate(self, system: System, path: BlockPath, is_root: bool) -> None:
        seen: dict[str, Block] = {}
        for block in system.blocks:
            tok = self.where.get(id(block))
            line, col = (tok.line, tok.column) if tok else (0, 0)
            bpath = path.child(block.name)
            if block.name in seen:
                first = self.where.get(id(seen[block.name]))
                first_at = f" (first declared at line {first.line})" if first else ""
                raise ValidationError(str(bpath), f"duplicate block name {block.name!r} in {path}{first_at}", line, col)
            seen[block.name] = block
            if block.inner is not None and block.kind is not BlockKind.SUBSYSTEM:
                raise ValidationError(str(bpath), f"{block.block_type} block cannot own a System", line, col)
            if block.kind is BlockKind.TRIGGER_PORT and is_root:
                raise ValidationError(str(bpath), "TriggerPort outside a Subsystem", line, col)
        for sl in system.lines:
            tok = self.where.get(id(sl))
            line, col = (tok.line, tok.column) if tok else (0, 0)
            for end, port, idx in (("source", sl.src_block, sl.src_port), ("destination", sl.dst_block, sl.dst_port)):
                target = seen.get(port)
                if target is None:
                    raise ValidationError(str(path), f"line {end} {port!r} is not a block in this system", line, col)
                counts = port_counts(target)
                if counts is not None:
                    limit = counts[1] if end == "source" else counts[0]
                    if idx > limit:
                        raise ValidationError(
                            str(path.child(port)), f"line {end} port {idx} exceeds the block's {limit} port(s)", line, col
                        )
        for block in system.blocks:
            if block.inner is not None:
                self.validate(block.inner, path.child(block.name), is_root=False)


def parse_model(tokens: list[Token], source: str | None = None) -> ModelFile:
    try:
        model = _Parser(tokens).model()
    except LoadError as exc:
        if source:
            exc.with_source(source)
        raise
    model.source_path = source
    return model


def read_model(text: str, source: str | None = None) -> ModelFile:
    try:
        tokens = lex(text)
    except LoadError as exc:
        if source:
            exc.with_source(source)
        raise
    return parse_model(tokens, source)


def load_model(path: str | Path) -> ModelFile:
    path = Path(path)
    return read_model(path.read_text(encoding="utf-8"), str(path))


# --- serialization ---------------------------------------------------------


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def format_value(value: ParamValue) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean parameters are not representable; use \"on\"/\"off\"")
    if isinstance(value, str):
        return _quote(value)
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + " ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"unsupported parameter value {value!r}")


def _emit_system(system: System, out: list[str], indent: int) -> None:
    pad = "  " * indent
    out.append(f"{pad}System {{")
    for block in system.blocks:
        inner_pad = pad + "  "
        out.append(f"{inner_pad}Block {{")
        kv = dict(block.params)
        if block.position is not None:
            kv["Position"] = list(block.position)
        if block.commented:
            kv["Commented"] = "on"
        out.append(f"{inner_pad}  Name {_quote(block.name)}")
        out.append(f"{inner_pad}  BlockType {_quote(block.block_type)}")
        for key in sorted(kv):
            out.append(f"{inner_pad}  {key} {format_value(kv[key])}")
        if block.inner is not None:
            _emit_system(block.inner, out, indent + 2)
        out.append(f"{inner_pad}}}")
    for sl in system.lines:
        inner_pad = pad + "  "
        kv = dict(sl.params)
        kv.update(SrcBlock=sl.src_block, SrcPort=sl.src_port, DstBlock=sl.dst_block, DstPort=sl.dst_port)
        out.append(f"{inner_pad}Line {{")
        for key in sorted(kv):
            out.append(f"{inner_pad}  {key} {format_value(kv[key])}")
        out.append(f"{inner_pad}}}")
    out.append(f"{pad}}}")


def serialize_model(model: ModelFile) -> str:
    out = [f"{model.kind.value} {{", f"  Name {_quote(model.name)}"]
    for key in sorted(model.params):
        out.append(f"  {key} {format_value(model.params[key])}")
    _emit_system(model.root, out, 1)
    out.append("}")
    return "\n".join(out) + "\n"


# --- dictionaries ----------------------------------------------------------


class ScopeKind(str, Enum):
    DICTIONARY = "Dictionary"
    BASE_WORKSPACE = "BaseWorkspace"
    MODEL_WORKSPACE = "ModelWorkspace"


@dataclass
class DataStoreDecl:
    name: str
    data_type: str = "auto"
    dimensions: int = -1
    sample_time: int | float = -1
    params: dict[str, ParamValue] = field(default_factory=dict)


@dataclass
class DictionaryFile:
    entries: list[DataStoreDecl] = field(default_factory=list)
    source_path: str | None = field(default=None, compare=False)
    scope_kind: ScopeKind = ScopeKind.DICTIONARY

    @property
    def name(self) -> str:
        """File stem, used as the dependency name."""
        return Path(self.source_path).stem if self.source_path else "<dictionary>"

    def lookup(self, name: str) -> DataStoreDecl | None:
        for entry in self.entries:
            if entry.name == name:
                return entry
        return None


def parse_dictionary(text: str, source: str | None = None, scope_kind: ScopeKind | str | None = None) -> DictionaryFile:
    try:
        p = _Parser(lex(text))
        declared_scope = None
        if p.at(TokenKind.IDENTIFIER, "Scope"):
            p.pos += 1
            tok = p.expect(TokenKind.STRING)
            try:
                declared_scope = ScopeKind(tok.text)
            except ValueError:
                raise ValidationError("<dictionary>", f"unknown Scope {tok.text!r}", tok.line, tok.column) from None
        entries: list[DataStoreDecl] = []
        names: set[str] = set()
        while p.peek() is not None:
            start = p.expect(TokenKind.IDENTIFIER, "DataStore")
            p.expect(TokenKind.LBRACE)
            raw: dict[str, ParamValue] = {}
            while not p.at(TokenKind.RBRACE):
                p.kv(raw, "<DataStore>")
            p.expect(TokenKind.RBRACE)
            name = raw.pop("Name", None)
            if not isinstance(name, str) or not name:
                raise ValidationError("<DataStore>", "entry needs a nonempty Name", start.line, start.column)
            if name in names:
                raise DuplicateEntry(name, start.line, start.column)
            names.add(name)
            entry = DataStoreDecl(name)
            if "DataType" in raw:
                entry.data_type = str(raw.pop("DataType"))
            if "Dimensions" in raw:
                entry.dimensions = raw.pop("Dimensions")
            if "SampleTime" in raw:
                entry.sample_time = raw.pop("SampleTime")
            entry.params = raw
            entries.append(entry)
    except LoadError as exc:
        if source:
            exc.with_source(source)
        raise
    kind = ScopeKind(scope_kind) if scope_kind is not None else (declared_scope or ScopeKind.DICTIONARY)
    return DictionaryFile(entries, source, kind)


def load_dictionary(path: str | Path, scope_kind: ScopeKind | str | None = None) -> DictionaryFile:
    path = Path(path)
    return parse_dictionary(path.read_text(encoding="utf-8"), str(path), scope_kind)


def serialize_dictionary(d: DictionaryFile) -> str:
    out: list[str] = []
    if d.scope_kind is not ScopeKind.DICTIONARY:
        out.append(f"Scope {_quote(d.scope_kind.value)}")
    for e in d.entries:
        kv = dict(e.params)
        kv.update(DataType=e.data_type, Dimensions=e.dimensions, SampleTime=e.sample_time)
        out.append("DataStore {")
        out.append(f"  Name {_quote(e.name)}")
        for key in sorted(kv):
            out.append(f"  {key} {format_value(kv[key])}")
        out.append("}")
    return "\n".join(out) + ("\n" if out else "")
