"""``slm`` command line.

Exit codes: 0 success, 1 diagnostics emitted, 2 parse or validation error,
3 resolution error, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from slm.deps import (
    collect_dependencies,
    dependencies_to_json,
    dictionary_params,
    render_dependencies_text,
    resolve_closure,
    search_path_from_env,
)
from slm.errors import AmbiguousCall, LoadError, RefactorError, SlmError, UnknownFunction
from slm.guidelines import Rule, RuleConfig, Severity, diagnostics_to_json, render_diagnostics_text, run_guidelines
from slm.interface import (
    extract_interface,
    inject_interface_pattern,
    interface_to_json,
    remove_interface_pattern,
    render_interface_text,
)
from slm.metrics import cyclomatic_complexity, interactions, interface_complexity, metrics_to_json, render_metrics_text
from slm.model import BlockKind, BlockPath, ModelFile
from slm.parser import load_dictionary, load_model, serialize_model
from slm.refactor import RefactorResult, convert_scope, create_caller, parse_target, wrap_subsystem_as_function
from slm.scope import FunctionTable, case_of, collect_call_sites, list_callable, resolve_call

EXIT_OK, EXIT_FINDINGS, EXIT_LOAD, EXIT_RESOLUTION, EXIT_USAGE = range(5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- helpers ---------------------------------------------------------------


def _model(path: str) -> ModelFile:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{path}: no such file")
    return load_model(p)


def _dicts(model: ModelFile | None, paths: Sequence[str]):
    """Dictionaries named on the command line, then those the model names beside it."""
    found = [load_dictionary(p) for p in paths]
    if model is not None and model.source_path:
        here = Path(model.source_path).parent
        for stem in dictionary_params(model):
            candidate = here / f"{stem}.smd"
            if candidate.is_file() and all(d.name != stem for d in found):
                found.append(load_dictionary(candidate))
    return found


def _imports(specs: Sequence[str]) -> list[tuple[str, ModelFile]]:
    out = []
    for spec in specs:
        ref, sep, path = spec.partition("=")
        if not sep or not ref:
            raise UsageError(f"--import expects NAME=FILE, got {spec!r}")
        out.append((ref, _model(path)))
    return out


def _write_model(model: ModelFile, args) -> None:
    text = serialize_model(model)
    if args.in_place:
        Path(args.file).write_text(text)
    elif args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _report_change(result: RefactorResult, args) -> None:
    # the model itself went to stdout when there is no output file
    stream = sys.stdout if (args.output or args.in_place) else sys.stderr
    if args.format == "json":
        stream.write(json.dumps(result.to_json(), indent=2) + "\n")
        return
    for p in result.added:
        stream.write(f"added {p}\n")
    for p in result.removed:
        stream.write(f"removed {p}\n")
    for a, b in result.moved:
        stream.write(f"moved {a} -> {b}\n")
    for p in result.modified:
        stream.write(f"modified {p}\n")
    for item in result.worklist:
        stream.write(f"todo {item}\n")


def _find_function(table: FunctionTable, key: str):
    by_path = [f for f in table.functions if str(f.path) == key]
    if by_path:
        return by_path[0]
    named = [f for f in table.functions if f.function_name == key]
    if not named:
        raise UnknownFunction(key, BlockPath((table.model.name,)))
    if len(named) > 1:
        raise AmbiguousCall(key, [f.path for f in named])
    return named[0]


# --- commands ----------------------------------------------------------------


def cmd_parse(args) -> int:
    if args.file.endswith(".smd"):
        d = load_dictionary(args.file)
        print(f"{args.file}: ok, {len(d.entries)} data stores ({d.scope_kind.value})")
        return EXIT_OK
    model = _model(args.file)
    blocks = sum(1 for _ in model.iter_blocks(include_commented=True))
    systems = sum(1 for _ in model.iter_systems(include_commented=True))
    if args.strict:
        table = FunctionTable(model)
        for call in collect_call_sites(model):
            if call.qualifier is None:
                resolve_call(call, table)
    print(f"{args.file}: ok, {model.kind.value} {model.name}, {blocks} blocks, {systems} systems")
    return EXIT_OK


def cmd_interface(args) -> int:
    model = _model(args.file)
    if args.remove_pattern:
        _write_model(remove_interface_pattern(model), args)
        return EXIT_OK
    iface = extract_interface(model, _dicts(model, args.dict))
    if args.inject:
        _write_model(inject_interface_pattern(model, iface), args)
        return EXIT_OK
    text = json.dumps(interface_to_json(iface), indent=2) + "\n" if args.format == "json" else render_interface_text(iface)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    rules = set(Rule)
    if args.rules:
        try:
            rules = {Rule.parse(r) for r in args.rules.split(",") if r.strip()}
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    cfg = RuleConfig(enabled_rules=rules, g2_allow_global=list(args.allow_global), include_notes=args.notes)
    findings = []
    for path in args.files:
        model = _model(path)
        findings += run_guidelines(model, _dicts(model, args.dict), cfg)
    if args.format == "json":
        print(diagnostics_to_json(findings))
    else:
        sys.stdout.write(render_diagnostics_text(findings))
    return EXIT_FINDINGS if any(d.severity is not Severity.INFO for d in findings) else EXIT_OK


def cmd_metrics(args) -> int:
    model = _model(args.file)
    libs = [_model(p) for p in args.lib]
    peers = libs + [_model(p) for p in args.peer]
    dicts = _dicts(model, args.dict)
    cc = cyclomatic_complexity(model, libs)
    icx = interface_complexity(extract_interface(model, dicts))
    inter = interactions(model, peers, dicts)
    if args.format == "json":
        print(metrics_to_json(cc, icx, inter))
    else:
        sys.stdout.write(render_metrics_text(cc, icx, inter))
    return EXIT_OK


def cmd_deps(args) -> int:
    search = [Path(p) for p in args.search_path] or search_path_from_env() or [Path(args.file).parent]
    if not args.recursive:
        model = _model(args.file)
        deps = collect_dependencies(model, _dicts(None, args.dict))
        if args.format == "json":
            print(dependencies_to_json(deps))
        elif args.format == "dot":
            lines = [f'  "{model.name}" -> "{n}" [label="{k.value}"];' for n, k in deps]
            print("digraph dependencies {\n" + "\n".join(lines) + ("\n" if lines else "") + "}")
        else:
            sys.stdout.write(render_dependencies_text(deps))
        return EXIT_OK
    if not Path(args.file).is_file():
        raise UsageError(f"{args.file}: no such file")
    graph = resolve_closure(args.file, search)
    for w in graph.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "json":
        print(json.dumps(graph.to_json(), indent=2))
    elif args.format == "dot":
        sys.stdout.write(graph.to_dot())
    else:
        sys.stdout.write(graph.to_text())
    if graph.unresolved:
        for n in graph.unresolved:
            print(f"{args.file}: unresolved dependency {n}", file=sys.stderr)
        return EXIT_RESOLUTION
    return EXIT_OK


def cmd_fn_scope(args) -> int:
    model = _model(args.file)
    f = _find_function(FunctionTable(model), args.function)
    try:
        target = parse_target(args.to)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = convert_scope(model, f, target)
    _write_model(result.model, args)
    _report_change(result, args)
    return EXIT_OK


def cmd_fn_list(args) -> int:
    model = _model(args.file)
    at = BlockPath.parse(args.at) if args.at else model.root_path
    entries = list_callable(at, model, _imports(args.imports))
    if args.format == "json":
        print(json.dumps([{"name": n, "path": str(f.path), "case": case_of(f).value} for n, f in entries], indent=2))
    else:
        for name, f in entries:
            print(f"{name}  {f.path}  {f.signature}")
    return EXIT_OK


def cmd_fn_call(args) -> int:
    model = _model(args.file)
    at = BlockPath.parse(args.at) if args.at else model.root_path
    result = create_caller(model, at, args.target, _imports(args.imports))
    _write_model(result.model, args)
    _report_change(result, args)
    return EXIT_OK


def cmd_wrap(args) -> int:
    model = _model(args.file)
    result = wrap_subsystem_as_function(model, BlockPath.parse(args.subsystem), args.name)
    _write_model(result.model, args)
    _report_change(result, args)
    return EXIT_OK


def cmd_gen(args) -> int:
    from slm.fixtures import census_model, generate_model, write_data

    if args.fixtures:
        for p in write_data(Path(args.fixtures)):
            print(p)
        return EXIT_OK
    model = census_model(args.seed) if args.census else generate_model(args.depth, args.blocks, args.seed)
    text = serialize_model(model)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------------


def _writes(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("-o", "--output", help="write the transformed model here")
    g.add_argument("--in-place", action="store_true", help="overwrite the input file")
    p.add_argument("--format", choices=("text", "json"), default="text", help="change summary format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slm", description="Analyse and restructure block-diagram modules.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("parse", help="parse and validate a model or dictionary")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="also resolve every unqualified function call")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("interface", help="print the module interface or draw it into the model")
    p.add_argument("file")
    p.add_argument("--dict", action="append", default=[], metavar="F")
    p.add_argument("--format", choices=("text", "json"), default="text")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--inject", action="store_true", help="add the commented interface pattern")
    g.add_argument("--remove-pattern", action="store_true", help="strip the interface pattern")
    p.add_argument("-o", "--output")
    p.add_argument("--in-place", action="store_true")
    p.set_defaults(run=cmd_interface)

    p = sub.add_parser("check", help="run the modelling guidelines")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--dict", action="append", default=[], metavar="F")
    p.add_argument("--rules", help="comma separated, e.g. g1,g3")
    p.add_argument("--allow-global", action="append", default=[], metavar="PATTERN")
    p.add_argument("--notes", action="store_true", help="include informational notes")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("metrics", help="complexity and interaction counts")
    p.add_argument("file")
    p.add_argument("--lib", action="append", default=[], metavar="F")
    p.add_argument("--peer", action="append", default=[], metavar="F", help="other models to count interactions with")
    p.add_argument("--dict", action="append", default=[], metavar="F")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(run=cmd_metrics)

    p = sub.add_parser("deps", help="list or resolve dependencies")
    p.add_argument("file")
    p.add_argument("--recursive", action="store_true")
    p.add_argument("--search-path", action="append", default=[], metavar="DIR")
    p.add_argument("--dict", action="append", default=[], metavar="F")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.set_defaults(run=cmd_deps)

    fn = sub.add_parser("fn", help="function scope tools").add_subparsers(dest="fn_command", parser_class=_Parser, metavar="ACTION")
    fn.required = True
    p = fn.add_parser("scope", help="convert a function's scope")
    p.add_argument("file")
    p.add_argument("function", help="function name or block path")
    p.add_argument("--to", required=True, help="global, exported or subsystem:PATH")
    _writes(p)
    p.set_defaults(run=cmd_fn_scope)

    p = fn.add_parser("list", help="functions callable from a system")
    p.add_argument("file")
    p.add_argument("--at", help="system path (default: root)")
    p.add_argument("--import", dest="imports", action="append", default=[], metavar="NAME=FILE")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(run=cmd_fn_list)

    p = fn.add_parser("call", help="add a function caller")
    p.add_argument("file")
    p.add_argument("--at", help="system path (default: root)")
    p.add_argument("--target", required=True, help="name as shown by 'fn list'")
    p.add_argument("--import", dest="imports", action="append", default=[], metavar="NAME=FILE")
    _writes(p)
    p.set_defaults(run=cmd_fn_call)

    p = sub.add_parser("wrap", help="turn a virtual subsystem into a function")
    p.add_argument("file")
    p.add_argument("subsystem")
    p.add_argument("--name", required=True)
    _writes(p)
    p.set_defaults(run=cmd_wrap)

    p = sub.add_parser("gen")  # development helper, not listed in help
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--blocks", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--census", action="store_true")
    p.add_argument("--fixtures", metavar="DIR", help="write every replica fixture under DIR")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_gen)
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "gen"]
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"slm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LoadError as exc:
        print(exc, file=sys.stderr)
        return EXIT_LOAD
    except (SlmError, RefactorError) as exc:
        where = getattr(args, "file", None) or (args.files[0] if getattr(args, "files", None) else "slm")
        print(f"{where}: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except OSError as exc:
        print(f"slm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
