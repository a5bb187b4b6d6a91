"""
Command-line harness over the built-in ADTs and example programs.

Results go to standard output; failures print ``{"error": code, "detail": text}``
on standard error and exit 1 (usage, unknown example, bad ``--args``) or 2
(anything else).
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from adtembed import errors
from adtembed.ast import CaseE, Switch, count_nodes, pretty, reset_fresh_names
from adtembed.catalog.adts import builtin_registry
from adtembed.catalog.programs import EXAMPLES, ExampleProgram, get_example
from adtembed.codec import expr_to_json, trace_to_json, value_to_json, values_from_json
from adtembed.config import configure_logging
from adtembed.lower import lower_expr
from adtembed.trace import enumerate_traces, pretty_trace
from adtembed.types import AdtRegistry, AdtTy, SurfaceType, parse_typeref, pretty_surface, pretty_value

logger = logging.getLogger(__name__)

USAGE_ERRORS = (errors.BadArgs, errors.UnknownExample)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage problems as BadArgs instead of exiting."""

    def error(self, message: str):
        raise errors.BadArgs(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="adt-embed",
        description="Inspect, evaluate and lower embedded programs over user-defined ADTs.",
    )
    parser.add_argument('-l', '--log-level', type=str, default=None,
                        help="Log level of the adtembed logger (default: ADTEMBED_LOG_LEVEL or WARNING)")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("list", help="List the example programs")

    dump = commands.add_parser("dump", help="Print the matched AST of an example over its parameters")
    dump.add_argument("name", help="Example name (see 'list')")
    dump.add_argument('-f', '--format', choices=("pretty", "json"), default="pretty",
                      help="Output format (default: pretty)")

    run = commands.add_parser("eval", help="Evaluate an example on host values")
    run.add_argument("name", help="Example name (see 'list')")
    run.add_argument('-a', '--args', type=str, required=True,
                     help='JSON array of values, e.g. \'[{"scalar": {"kind": "f64", "value": 1.0}}]\'')

    lower = commands.add_parser("lower", help="Print an example after case lowering")
    lower.add_argument("name", help="Example name (see 'list')")
    lower.add_argument('-f', '--format', choices=("pretty", "json"), default="pretty",
                       help="Output format (default: pretty)")
    lower.add_argument('--no-dedup', action="store_true",
                       help="Keep every switch arm instead of folding equal arms into a default (default: ADTEMBED_DEDUP_DEFAULTS)")

    trace = commands.add_parser("trace", help="Enumerate the traces of a type")
    trace.add_argument("type", help='ADT name, i64, f64 or JSON typeref, e.g. MaybeBool or \'{"tuple": ["f64", {"adt": "Bool"}]}\'')
    trace.add_argument('-f', '--format', choices=("pretty", "json"), default="pretty",
                       help="Output format (default: pretty)")

    commands.add_parser("adts", help="Print the registered ADT schemas")

    check = commands.add_parser("check", help="Compare eval, lowered eval and the host reference")
    check.add_argument("name", nargs="?", default=None, help="Example name (default: all examples)")
    return parser


def parse_type_argument(text: str, registry: AdtRegistry) -> SurfaceType:
    """An ADT name, a bare primitive (``i64``, ``f64``) or a JSON typeref."""
    if text in registry:
        return AdtTy(text)
    if text in ("i64", "f64"):
        return parse_typeref(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return AdtTy(text)
    return parse_typeref(data)


def parse_args_json(text: str, program: ExampleProgram, registry: AdtRegistry) -> list:
    try:
        values = values_from_json(json.loads(text))
        program.check_arguments(values, registry)
    except json.JSONDecodeError as exc:
        raise errors.BadArgs(f"--args is not valid JSON: {exc}") from exc
    except errors.EmbedError as exc:
        raise errors.BadArgs(f"--args: {exc.message}") from exc
    return values


def cmd_list(registry: AdtRegistry) -> int:
    for program in EXAMPLES.values():
        signature = ", ".join(
            f"{name}: {pretty_surface(t)}" for name, t in zip(program.arg_names, program.arg_types)
        )
        print(f"{program.name}({signature}) -> {pretty_surface(program.result_type)}    {program.description}")
    return 0


def cmd_dump(name: str, fmt: str, registry: AdtRegistry) -> int:
    term = get_example(name).term(registry)
    print(json.dumps(expr_to_json(term), indent=2) if fmt == "json" else pretty(term))
    return 0


def cmd_eval(name: str, args_text: str, registry: AdtRegistry) -> int:
    program = get_example(name)
    values = parse_args_json(args_text, program, registry)
    print(json.dumps(value_to_json(program.run(values, registry))))
    return 0


def cmd_lower(name: str, fmt: str, dedup: Optional[bool], registry: AdtRegistry) -> int:
    lowered = lower_expr(get_example(name).term(registry), registry, dedup=dedup)
    logger.info("%s lowered to %d switch node(s)", name, count_nodes(lowered, Switch))
    print(json.dumps(expr_to_json(lowered), indent=2) if fmt == "json" else pretty(lowered))
    return 0


def cmd_trace(type_text: str, fmt: str, registry: AdtRegistry) -> int:
    t = parse_type_argument(type_text, registry)
    traces = enumerate_traces(registry.repr_of(t), registry)
    if fmt == "json":
        print(json.dumps([trace_to_json(tr) for tr in traces]))
        return 0
    print(f"{len(traces)} trace(s) for {pretty_surface(t)}:")
    for i, tr in enumerate(traces):
        print(f"  {i}: {pretty_trace(tr)}")
    return 0


def cmd_adts(registry: AdtRegistry) -> int:
    print(json.dumps([decl.model_dump(mode="json") for decl in registry.decls()], indent=2))
    return 0


def check_program(program: ExampleProgram, registry: AdtRegistry) -> list[str]:
    """Run an example over its domain; returns one message per disagreeing input."""
    failures = []

    def _show(values) -> str:
        return ", ".join(pretty_value(v, registry) for v in values)

    for values in program.domain():
        expected = program.reference(*values)
        try:
            results = {
                "eval": program.run(values, registry),
                "lowered": program.run(values, registry, lowered=True),
            }
        except errors.EmbedError as exc:
            failures.append(f"{_show(values)}: {exc.code}: {exc.message}")
            continue
        for mode, result in results.items():
            if result != expected:
                failures.append(
                    f"{_show(values)}: {mode} gave {pretty_value(result, registry)}, "
                    f"expected {pretty_value(expected, registry)}"
                )
    return failures


def cmd_check(name: Optional[str], registry: AdtRegistry) -> int:
    programs = [get_example(name)] if name else list(EXAMPLES.values())
    all_ok = True
    for program in programs:
        inputs = len(program.domain())
        failures = check_program(program, registry)
        cases = count_nodes(program.term(registry), CaseE)
        if failures:
            all_ok = False
            print(f"✗ {program.name}: {len(failures)}/{inputs} input(s) disagree")
            for failure in failures:
                print(f"    {failure}")
        else:
            print(f"✓ {program.name}: {inputs} input(s) agree ({cases} case node(s))")
    return 0 if all_ok else 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        try:
            configure_logging(args.log_level)
        except ValueError as exc:
            raise errors.BadArgs(f"--log-level: {exc}") from exc
        reset_fresh_names()
        registry = builtin_registry()
        match args.command:
            case "list":
                return cmd_list(registry)
            case "dump":
                return cmd_dump(args.name, args.format, registry)
            case "eval":
                return cmd_eval(args.name, args.args, registry)
            case "lower":
                return cmd_lower(args.name, args.format, False if args.no_dedup else None, registry)
            case "trace":
                return cmd_trace(args.type, args.format, registry)
            case "adts":
                return cmd_adts(registry)
            case "check":
                return cmd_check(args.name, registry)
        raise errors.BadArgs(f"unknown command {args.command!r}")
    except errors.EmbedError as exc:
        print(json.dumps(exc.to_json()), file=sys.stderr)
        return 1 if isinstance(exc, USAGE_ERRORS) else 2


if __name__ == "__main__":
    sys.exit(main())
