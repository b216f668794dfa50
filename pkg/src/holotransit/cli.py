"""Command line: ``analyze``, ``classify`` and ``witness``.

Exit codes: 0 when a report was produced (whatever the verdict), 1 for usage
and configuration errors, 2 for execution failures.  An incomplete report is
still written, with exit code 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from .config import load_config
from .errors import HoloTransitError, ParseError, ValidationError
from .families import classify, parse_family
from .report import run_scenario, witness_report
from .svg import emit_svg

log = logging.getLogger("holotransit")

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="holotransit", description="Disjoint transitivity of composition operators.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="run a scenario and write the JSON report")
    a.add_argument("--config", required=True)
    a.add_argument("--out", help="report path (defaults to outputs.report in the config)")
    a.add_argument("--svg", help="figure path (defaults to outputs.svg in the config)")
    a.add_argument("--threads", type=int)
    a.add_argument("--wall-clock", action="store_true",
                   help="record wall-clock seconds (reports are then not byte-reproducible)")

    c = sub.add_parser("classify", help="classify a member list against a family")
    c.add_argument("--members", required=True, help="file with integers (JSON list or whitespace separated)")
    c.add_argument("--horizon", type=int, required=True)
    c.add_argument("--family", required=True, choices=["infinite", "cofinite", "syndetic", "thick"])
    c.add_argument("--param", type=int)
    c.add_argument("--out")

    w = sub.add_parser("witness", help="fit and verify a witness function at index n")
    w.add_argument("--config", required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--wall-clock", action="store_true")
    return p


def read_members(path) -> list:
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        data = json.loads(text)
    else:
        data = [int(t) for t in re.split(r"[\s,]+", text) if t]
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
        raise ValueError("members must be integers")
    return data


def _analyze(args) -> int:
    cfg = load_config(args.config)
    out = args.out or cfg.outputs.report
    if not out:
        raise ValidationError("outputs.report", "no report path given")
    svg = args.svg or cfg.outputs.svg
    doc = run_scenario(cfg, wall_clock=args.wall_clock, threads=args.threads)
    doc.write(out)
    if svg:
        emit_svg(doc, svg)
    status = doc.transitivity["status"] if doc.transitivity else "none"
    print(f"{status} ({doc.status}) -> {out}")
    return EXIT_OK if doc.status == "complete" else EXIT_FAILURE


def _classify(args) -> int:
    members = read_members(args.members)
    if any(m < 1 or m > args.horizon for m in members):
        raise ValidationError("members", f"members must lie in [1, {args.horizon}]")
    v = classify(sorted(set(members)), parse_family(args.family, args.param), horizon=args.horizon)
    text = json.dumps(v.to_dict(), sort_keys=True, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def _witness(args) -> int:
    if args.n < 1:
        raise ValidationError("n", "the index must be positive")
    cfg = load_config(args.config)
    doc = witness_report(cfg, args.n, wall_clock=args.wall_clock)
    doc.write(args.out)
    ok = doc.witness is not None and doc.witness["check"]["ok"]
    print(f"witness at n={args.n}: {'verified' if ok else 'not verified'} -> {args.out}")
    return EXIT_OK if doc.status == "complete" else EXIT_FAILURE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"analyze": _analyze, "classify": _classify, "witness": _witness}[args.command]
    try:
        return handler(args)
    except (ParseError, ValidationError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE
    except (HoloTransitError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
