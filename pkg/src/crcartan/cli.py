"""Command-line front end: ``crcartan <command> [options]``."""
from __future__ import annotations

import argparse
import sys

from .report import FORMATS, SUITES, ConfigError, RunConfig, dumps_json, dumps_latex, run


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="crcartan", description="Cartan equivalence engine for Class III_1 CR manifolds.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUITES:
        sp = sub.add_parser(name, help=f"run the {name} suite")
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
        sp.add_argument("--trace", action="store_true", help="add one record per collected monomial per stage")
        sp.add_argument("--flat", action="store_true", help="set every base function to zero in emitted forms")
        sp.add_argument("--checks", help="comma-separated subset of: " + ", ".join(SUITES[name]))
        sp.add_argument("--goldens", help="reference-value file replacing the packaged one")
        sp.add_argument("--algebra", help="JSON structure constants replacing the model algebra")
        sp.add_argument("--surface", help="JSON model surface replacing the cubic")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    checks = None
    if args.checks is not None:
        checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    cfg = RunConfig(args.command, args.fmt, args.trace, args.flat, checks, args.goldens, args.algebra, args.surface)
    try:
        doc, code = run(cfg)
    except ConfigError as exc:
        print(f"crcartan: configuration error: {exc}", file=sys.stderr)
        return 2
    text = dumps_json(doc) if cfg.fmt == "json" else dumps_latex(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
