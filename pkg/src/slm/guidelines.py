"""The four function and interface modelling guidelines as lint rules.

* G1 placement: a function sits in the lowest common parent system of its
  callers.
* G2 visibility: function visibility is scoped unless allow-listed.
* G3 shadowing: no two same-named, same-signature functions with overlapping
  scopes.
* G4 base workspace: no To/From Workspace blocks and no data stores held in
  the base workspace.

Notes (severity ``info``) are only produced when ``RuleConfig.include_notes``
is set: unused internal functions under G1, and file/spreadsheet blocks under
G4.  A block can silence a rule for itself with ``SLMLintAllow "G1"`` (comma
separated for several rules).
"""

from __future__ import annotations

import fnmatch
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from slm.errors import ResolutionError
from slm.interface import global_store_accesses, resolve_store
from slm.model import BlockKind, BlockPath, ModelFile
from slm.parser import DictionaryFile, ScopeKind
from slm.scope import (
    FunctionTable,
    ScopeCase,
    Visibility,
    case_of,
    collect_call_sites,
    detect_shadowing,
    resolve_call,
)


class Rule(str, Enum):
    G1 = "G1_Placement"
    G2 = "G2_Visibility"
    G3 = "G3_Shadowing"
    G4 = "G4_BaseWorkspace"

    @property
    def short(self) -> str:
        return self.value[:2]

    @classmethod
    def parse(cls, text: str) -> "Rule":
        key = text.strip().upper()
        for rule in cls:
            if key in (rule.short, rule.value.upper()):
                return rule
        raise ValueError(f"unknown rule {text!r}")


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class Diagnostic:
    rule: Rule
    severity: Severity
    subject: BlockPath
    message: str
    related: tuple[BlockPath, ...] = ()
    file: str = ""

    def sort_key(self):
        return (self.file, self.subject, self.rule.value, self.related, self.message)

    def to_json(self) -> dict:
        return {
            "rule": self.rule.value,
            "severity": self.severity.value,
            "subject": str(self.subject),
            "related": [str(p) for p in self.related],
            "message": self.message,
        }

    def __str__(self) -> str:
        return f"{self.rule.value} {self.severity.value} {self.subject}: {self.message}"


@dataclass
class RuleConfig:
    enabled_rules: set = field(default_factory=lambda: set(Rule))
    g2_allow_global: list = field(default_factory=list)
    severity_overrides: dict = field(default_factory=dict)
    include_notes: bool = False


MESSAGES = {
    "g1_above": "function is placed above the lowest common parent of its callers; move it to {target}",
    "g1_below": "function is placed below or beside its callers; move it to {target}",
    "g1_unused": "internal function has no callers",
    "g2": "function visibility is global; limit it to scoped",
    "g3": "function {name!r} shadows a same-signature function at {peer}",
    "g4_workspace": "{kind} block uses the base workspace; place data in the model workspace or a data dictionary",
    "g4_store": "data store {store!r} lives in the base workspace ({source}); place it in the model workspace or a data dictionary",
    "g4_file": "{kind} block is not recommended for production",
}


def _allowed(model: ModelFile, path: BlockPath, rule: Rule) -> bool:
    raw = model.find(path).param("SLMLintAllow")
    if not isinstance(raw, str):
        return False
    return rule.short in {part.strip().upper()[:2] for part in raw.split(",")}


def lowest_common_parent(systems: Sequence[BlockPath]) -> BlockPath:
    """Deepest system containing all of ``systems`` (longest common path prefix)."""
    prefix = systems[0].segments
    for s in systems[1:]:
        n = 0
        for a, b in zip(prefix, s.segments):
            if a != b:
                break
            n += 1
        prefix = prefix[:n]
    return BlockPath(prefix)


def intra_model_callers(table: FunctionTable) -> dict[BlockPath, list[BlockPath]]:
    """Function path -> caller block paths that resolve to it within the model."""
    callers: dict[BlockPath, list[BlockPath]] = {f.path: [] for f in table.functions}
    for call in collect_call_sites(table.model):
        if call.qualifier is not None:
            continue
        try:
            f = resolve_call(call, table)
        except ResolutionError:
            continue
        callers[f.path].append(call.path)
    return callers


def check_placement(model: ModelFile, table: FunctionTable | None = None, include_notes: bool = False) -> list[Diagnostic]:
    table = table or FunctionTable(model)
    callers = intra_model_callers(table)
    found = []
    for f in table.functions:
        if _allowed(model, f.path, Rule.G1):
            continue
        calls = callers[f.path]
        if not calls:
            if include_notes and case_of(f) in (ScopeCase.VIRTUAL, ScopeCase.NONVIRTUAL):
                found.append(Diagnostic(Rule.G1, Severity.INFO, f.path, MESSAGES["g1_unused"]))
            continue
        target = lowest_common_parent([c.parent for c in calls])
        home = f.parent_system
        if home == target:
            continue
        key = "g1_above" if home.contains(target) else "g1_below"
        found.append(
            Diagnostic(Rule.G1, Severity.WARNING, f.path, MESSAGES[key].format(target=target), tuple(sorted(calls)))
        )
    return found


def check_visibility(model: ModelFile, cfg: RuleConfig | None = None, table: FunctionTable | None = None) -> list[Diagnostic]:
    cfg = cfg or RuleConfig()
    table = table or FunctionTable(model)
    found = []
    for f in table.functions:
        if f.visibility is not Visibility.GLOBAL:
            continue
        if any(fnmatch.fnmatchcase(f.function_name, pat) for pat in cfg.g2_allow_global):
            continue
        if _allowed(model, f.path, Rule.G2):
            continue
        found.append(Diagnostic(Rule.G2, Severity.WARNING, f.path, MESSAGES["g2"]))
    return found


def check_shadowing(model: ModelFile, table: FunctionTable | None = None) -> list[Diagnostic]:
    table = table or FunctionTable(model)
    found = []
    for a, b in detect_shadowing(table):
        if _allowed(model, a.path, Rule.G3):
            continue
        found.append(
            Diagnostic(Rule.G3, Severity.WARNING, a.path, MESSAGES["g3"].format(name=a.function_name, peer=b.path), (b.path,))
        )
    return found


_WORKSPACE_KINDS = {BlockKind.TO_WORKSPACE: "To Workspace", BlockKind.FROM_WORKSPACE: "From Workspace"}
_FILE_KINDS = {BlockKind.TO_FILE: "To File", BlockKind.FROM_FILE: "From File", BlockKind.FROM_SPREADSHEET: "From Spreadsheet"}


def check_base_workspace(
    model: ModelFile, dicts: Sequence[DictionaryFile] = (), include_notes: bool = False
) -> list[Diagnostic]:
    found = []
    for path, b in model.iter_blocks():
        if b.kind in _WORKSPACE_KINDS and not _allowed(model, path, Rule.G4):
            found.append(Diagnostic(Rule.G4, Severity.WARNING, path, MESSAGES["g4_workspace"].format(kind=_WORKSPACE_KINDS[b.kind])))
        elif include_notes and b.kind in _FILE_KINDS and not _allowed(model, path, Rule.G4):
            found.append(Diagnostic(Rule.G4, Severity.INFO, path, MESSAGES["g4_file"].format(kind=_FILE_KINDS[b.kind])))
    reads, writes = global_store_accesses(model)
    for accesses in (reads, writes):
        for store, paths in accesses.items():
            source, _ = resolve_store(store, dicts)
            if source is None or source.scope_kind is not ScopeKind.BASE_WORKSPACE:
                continue
            for path in paths:
                if not _allowed(model, path, Rule.G4):
                    found.append(
                        Diagnostic(Rule.G4, Severity.WARNING, path, MESSAGES["g4_store"].format(store=store, source=source.name))
                    )
    return found


def run_guidelines(
    model: ModelFile, dicts: Sequence[DictionaryFile] = (), cfg: RuleConfig | None = None
) -> list[Diagnostic]:
    cfg = cfg or RuleConfig()
    table = FunctionTable(model)
    found: list[Diagnostic] = []
    if Rule.G1 in cfg.enabled_rules:
        found += check_placement(model, table, cfg.include_notes)
    if Rule.G2 in cfg.enabled_rules:
        found += check_visibility(model, cfg, table)
    if Rule.G3 in cfg.enabled_rules:
        found += check_shadowing(model, table)
    if Rule.G4 in cfg.enabled_rules:
        found += check_base_workspace(model, dicts, cfg.include_notes)
    file = model.source_path or ""
    result = []
    for d in found:
        severity = cfg.severity_overrides.get(d.rule, d.severity) if d.severity is not Severity.INFO else d.severity
        result.append(Diagnostic(d.rule, Severity(severity), d.subject, d.message, d.related, file))
    return sorted(result, key=Diagnostic.sort_key)


def diagnostics_to_json(diagnostics: Sequence[Diagnostic]) -> str:
    return json.dumps([d.to_json() for d in diagnostics], indent=2)


def render_diagnostics_text(diagnostics: Sequence[Diagnostic]) -> str:
    return "".join(f"{d}\n" for d in diagnostics)
