"""``stc`` command line: eval, explain, frames, examples.

Exit codes: ``eval`` returns 0 for TRUE and 1 for FALSE; every command
returns 2 on a parse, IO or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from stc import report
from stc.bundled import EXAMPLES, example_text
from stc.dsl import DslError, QueryExpression, ScenarioDocument, parse_query, parse_scenario
from stc.geometry import DimensionError
from stc.semantics import ChoiceError, PropositionError
from stc.worlds import ScenarioError

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2
BUNDLED_PREFIX = "bundled:"


class CLIError(Exception):
    pass


def _use_color(stream) -> bool:
    env = os.environ.get("STC_COLOR")
    if env is not None:
        return env.strip() == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _load(path: str) -> ScenarioDocument:
    if path.startswith(BUNDLED_PREFIX):
        name = path[len(BUNDLED_PREFIX):]
        try:
            text = example_text(name)
        except KeyError as e:
            raise CLIError(e.args[0]) from None
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise CLIError(f"{path}: {e.strerror or e}") from None
        except UnicodeDecodeError:
            raise CLIError(f"{path}: not valid UTF-8") from None
    try:
        return parse_scenario(text)
    except DslError as e:
        raise CLIError("\n".join(f"{path}:{d}" for d in e.diagnostics)) from None


def _query(doc: ScenarioDocument, text: str) -> QueryExpression:
    if "=>" not in text:
        try:
            return doc.query(text)
        except KeyError:
            names = ", ".join(n for n, _ in doc.queries) or "none"
            raise CLIError(f"no query named {text!r} (available: {names})") from None
    try:
        return parse_query(text, doc.scenario)
    except DslError as e:
        raise CLIError("\n".join(f"<query>:{d}" for d in e.diagnostics)) from None


def cmd_eval(args: argparse.Namespace) -> int:
    doc = _load(args.file)
    q = _query(doc, args.query)
    verdict = report.run_query(doc.scenario, q)
    line = report.verdict_word(verdict.truth, _use_color(sys.stdout))
    if verdict.vacuous:
        line += " vacuous"
    print(line)
    return EXIT_TRUE if verdict.truth else EXIT_FALSE


def cmd_explain(args: argparse.Namespace) -> int:
    doc = _load(args.file)
    q = _query(doc, args.query)
    rep = report.explain(doc.scenario, q)
    if args.structured:
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        sys.stdout.write(rep.render(_use_color(sys.stdout)))
    return 0


def cmd_frames(args: argparse.Namespace) -> int:
    doc = _load(args.file)
    if doc.scenario.dim not in (None, 1):
        raise CLIError("frames require 1+1")
    q = _query(doc, args.query)
    rep = report.frames(doc.scenario, q)
    if args.structured:
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        sys.stdout.write(rep.render(_use_color(sys.stdout)))
    return 0


def cmd_examples(args: argparse.Namespace) -> int:
    text = example_text(args.name)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as e:
            raise CLIError(f"{args.output}: {e.strerror or e}") from None
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stc",
        description="Evaluate space-time counterfactuals over finite scenarios.",
        epilog=f"FILE may be a path or {BUNDLED_PREFIX}NAME for a bundled example. "
        "QUERY is a query name from FILE or an inline 'PHI => PSI [@selector]'.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="print TRUE or FALSE (exit 0 or 1)")
    p.add_argument("file", metavar="FILE")
    p.add_argument("query", metavar="QUERY")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("explain", help="show worlds, regions, support and witnesses")
    p.add_argument("file", metavar="FILE")
    p.add_argument("query", metavar="QUERY")
    p.add_argument("--structured", "--json", action="store_true", help="emit JSON")
    p.set_defaults(handler=cmd_explain)

    p = sub.add_parser("frames", help="frame verdict for every realisable time ordering")
    p.add_argument("file", metavar="FILE")
    p.add_argument("query", metavar="QUERY")
    p.add_argument("--structured", "--json", action="store_true", help="emit JSON")
    p.set_defaults(handler=cmd_frames)

    p = sub.add_parser("examples", help="write a bundled scenario file")
    p.add_argument("name", metavar="NAME", choices=EXAMPLES)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(handler=cmd_examples)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    try:
        return args.handler(args)
    except (CLIError, DimensionError, ChoiceError, PropositionError, ScenarioError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
