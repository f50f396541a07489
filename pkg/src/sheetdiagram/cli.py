"""Command-line interface: ``sheetdiagram {extract,graph,prompt,preview} FILE``.

Only the artifact goes to stdout (or ``--out``); diagnostics go to stderr.
Exit codes: 0 success, 2 fatal input error, 3 bad flags.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__
from .errors import Diagnostic, MissingEntityBlockError, SheetDiagramError
from .graph import GraphConfig, build_graph, export_graph
from .model import extract_diagram, serialize_json
from .preview import render_svg
from .prompts import TASKS, render_prompt

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="path to an .xlsx workbook")
    common.add_argument("--out", help="write the artifact to this file instead of stdout")

    thresholds = argparse.ArgumentParser(add_help=False)
    defaults = GraphConfig()
    thresholds.add_argument("--gap-tolerance", type=_non_negative, default=defaults.link_gap_tolerance,
                            help="max endpoint gap in pt (default %(default)s)")
    thresholds.add_argument("--overlap-min", type=_non_negative, default=defaults.containment_overlap_min,
                            help="min label overlap fraction (default %(default)s)")
    thresholds.add_argument("--annotation-distance", type=_non_negative, default=defaults.annotation_max_distance,
                            help="max annotation distance in pt (default %(default)s)")

    parser = _Parser(prog="sheetdiagram", description="Extract diagrams drawn in Excel workbooks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[common], help="canonical diagram JSON")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("graph", parents=[common, thresholds], help="components and connector edges")
    p.add_argument("--format", choices=["dot", "mermaid", "json"], default="dot")

    p = sub.add_parser("prompt", parents=[common], help="LLM prompt with the diagram JSON embedded")
    p.add_argument("--task", choices=TASKS, default="entities")
    p.add_argument("--entity-block", metavar="FILE", help="entity analysis text for --task relations ('-' reads stdin)")

    sub.add_parser("preview", parents=[common], help="SVG rendering for debugging")
    return parser


def _emit_diagnostics(diagnostics: Sequence[Diagnostic]) -> None:
    for d in diagnostics:
        print(d, file=sys.stderr)


def _read_entity_block(arg: str | None) -> str | None:
    if arg is None:
        return None
    if arg == "-":
        return sys.stdin.read()
    with open(arg, encoding="utf-8") as fh:
        return fh.read()


def _graph_config(args) -> GraphConfig:
    try:
        return GraphConfig(args.overlap_min, args.gap_tolerance, args.annotation_distance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run(args) -> str:
    """Produce the artifact text for parsed ``args``."""
    config = _graph_config(args) if args.command == "graph" else None
    entity_block = _read_entity_block(getattr(args, "entity_block", None))
    diagram = extract_diagram(args.input)
    _emit_diagnostics(diagram.diagnostics)
    if args.command == "extract":
        return serialize_json(diagram)
    if args.command == "graph":
        graph = build_graph(diagram, config)
        _emit_diagnostics(graph.diagnostics)
        return export_graph(graph, diagram, args.format)
    if args.command == "prompt":
        return render_prompt(args.task, serialize_json(diagram), entity_block)
    return render_svg(diagram)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "prompt" and args.task == "relations" and args.entity_block is None:
        print(f"sheetdiagram: error: {MissingEntityBlockError.__name__}: --task relations needs --entity-block",
              file=sys.stderr)
        return EXIT_INPUT
    try:
        text = run(args)
    except UsageError as exc:
        print(f"sheetdiagram: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SheetDiagramError, OSError, UnicodeDecodeError) as exc:
        print(f"sheetdiagram: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"sheetdiagram: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
