"""Command-line interface.

Subcommands: verify, generate, render, collect, score, report.  Exit codes:
0 success, 1 usage or configuration error, 2 data error, 3 partial collection.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .collect import CollectResult, ConfigError, EndpointConfig, collect
from .dsl import ParseError, PatternError, ValidityError, parse_rule
from .engine import loose_variants, verify_rule
from .generate import BucketError, GenConfig, LexiconError, generate_dataset
from .records import DataError, read_instructions, write_instructions
from .report import (
    REPORT_FORMATS,
    load_report,
    merge,
    render_report,
    score,
)
from .rules import LANGUAGES
from .templates import MissingTemplateError, load_templates, render_prompt

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _write_output(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_rule_lines(source: str) -> list[str]:
    return [line for line in source.splitlines() if line.strip()]


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        rule = parse_rule(args.rule)
    except (ParseError, PatternError, ValidityError) as exc:
        _err(f"bad rule expression: {exc}")
        return EXIT_DATA
    text = sys.stdin.read()
    strict = verify_rule(rule, text, args.lang)
    print(f"strict: {'pass' if strict else 'fail'}")
    if not args.strict_only:
        variant = None
        for vid, candidate in loose_variants(text):
            if verify_rule(rule, candidate, args.lang):
                variant = vid
                break
        if variant is None:
            print("loose: fail")
        else:
            print(f"loose: pass ({variant})")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("generation config must be a JSON object")
        if args.seed is not None:
            data["seed"] = args.seed
        if args.lang is not None:
            data["language"] = args.lang
        config = GenConfig.from_dict(data)
        templates = load_templates(args.templates) if args.templates else None
    except (OSError, ValueError) as exc:
        _err(f"cannot load generation config: {exc}")
        return EXIT_USAGE
    try:
        instructions = generate_dataset(config, templates)
    except (BucketError, LexiconError, MissingTemplateError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    write_instructions(args.output, instructions)
    print(f"wrote {len(instructions)} instructions to {args.output}")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    if args.rules_file:
        try:
            source = Path(args.rules_file).read_text(encoding="utf-8")
        except OSError as exc:
            _err(str(exc))
            return EXIT_DATA
    else:
        source = sys.stdin.read()
    lines = _load_rule_lines(source)
    if not lines:
        _err("no rule expressions supplied")
        return EXIT_DATA
    try:
        rules = [parse_rule(line) for line in lines]
    except (ParseError, PatternError, ValidityError) as exc:
        _err(f"bad rule expression: {exc}")
        return EXIT_DATA
    try:
        templates = load_templates(args.templates) if args.templates else None
    except (OSError, ValueError) as exc:
        _err(f"cannot load templates: {exc}")
        return EXIT_USAGE
    try:
        prompt = render_prompt(rules, args.lang, args.seed_task, templates)
    except MissingTemplateError as exc:
        _err(str(exc))
        return EXIT_USAGE
    print(prompt)
    return EXIT_OK


def cmd_collect(args: argparse.Namespace) -> int:
    try:
        config = EndpointConfig.from_file(args.config)
        if args.jobs is not None:
            config.max_in_flight = args.jobs
        config.credential()
    except (OSError, ConfigError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    try:
        result: CollectResult = collect(args.instructions, config, args.output)
    except DataError as exc:
        _err(str(exc))
        return EXIT_DATA
    print(
        f"collected {result.completed}/{result.requested} responses "
        f"({result.skipped} already present, {len(result.failed)} failed)"
    )
    if result.partial:
        _err(f"failed ids: {', '.join(result.failed)}")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    try:
        report = score(
            args.instructions,
            args.responses,
            jobs=args.jobs or 1,
            loose=not args.strict_only,
        )
    except DataError as exc:
        _err(str(exc))
        return EXIT_DATA
    except OSError as exc:
        _err(str(exc))
        return EXIT_DATA
    _write_output(render_report(report, args.format), args.output)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        reports = [load_report(path) for path in args.reports]
    except (OSError, DataError) as exc:
        _err(str(exc))
        return EXIT_DATA
    merged = merge(reports)
    _write_output(render_report(merged, args.format), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexcheck",
        description="Verify, generate and score fine-grained lexical constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check one rule against text read from stdin")
    p.add_argument("rule", help="one-line rule expression")
    p.add_argument("--lang", choices=LANGUAGES, default="en")
    p.add_argument("--strict-only", action="store_true", help="skip the relaxed rewrites")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="build an instruction dataset from a config file")
    p.add_argument("config", help="generation config (JSON)")
    p.add_argument("-o", "--output", required=True, help="instruction file to write (JSONL)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--lang", choices=LANGUAGES, help="override the config language")
    p.add_argument("--templates", help="template overlay file (JSON)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="render rule expressions into a prompt")
    p.add_argument("rules_file", nargs="?", help="file with one rule expression per line (default: stdin)")
    p.add_argument("--lang", choices=LANGUAGES, default="en")
    p.add_argument("--seed-task", default="Write a short answer to the task below.")
    p.add_argument("--templates", help="template overlay file (JSON)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("collect", help="fetch responses from a chat-completions endpoint")
    p.add_argument("instructions", help="instruction file (JSONL)")
    p.add_argument("config", help="endpoint config (JSON)")
    p.add_argument("-o", "--output", required=True, help="response journal to append to (JSONL)")
    p.add_argument("--jobs", type=int, help="maximum requests in flight")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("score", help="score responses against instructions")
    p.add_argument("instructions", help="instruction file (JSONL)")
    p.add_argument("responses", help="response file (JSONL)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--strict-only", action="store_true", help="skip the relaxed pass")
    p.add_argument("--format", choices=REPORT_FORMATS, default="structured")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="render or merge structured report files")
    p.add_argument("reports", nargs="+", help="structured report files (JSON)")
    p.add_argument("--format", choices=REPORT_FORMATS, default="table")
    p.add_argument("-o", "--output", help="write the rendering here instead of stdout")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 for --help
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
