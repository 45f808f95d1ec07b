"""Command line entry point: ``engine run | eval | char``."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Sequence

from .liedata import LieDataError, builtin
from .ratfunc import ParseError, RatFuncError
from .suites import SUITES, load_config, plan, run_task
from .vacore import ConfigError, Engine, EngineConfig
from .verma import brute_force_character, load_verma, module_character

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON (line {exc.lineno}): {exc.msg}") from None


def run_suites(doc: dict[str, Any], jobs: int = 1) -> list[dict[str, Any]]:
    """Run every planned task and return entries sorted by check_id."""
    cfg = load_config(doc)
    tasks = plan(cfg)
    entries: list[dict[str, Any]] = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_task, doc, *t) for t in tasks]
            for fut in futures:
                entries += fut.result()
    else:
        for t in tasks:
            entries += run_task(doc, *t)
    entries.sort(key=lambda e: (e["check_id"], e["suite"]))
    return entries


def format_text(entries: Sequence[dict[str, Any]]) -> str:
    lines = []
    for e in entries:
        status = "PASS" if e["pass"] else "FAIL"
        lines.append(f"{status} [{e['suite']}] {e['check_id']} -- {e['paper_ref']}")
        if not e["pass"]:
            lines.append(f"    lhs: {e['lhs']}")
            lines.append(f"    rhs: {e['rhs']}")
    lines.append("")
    lines += summary_lines(entries)
    return "\n".join(lines) + "\n"


def summary_lines(entries: Sequence[dict[str, Any]]) -> list[str]:
    total, failed = Counter(), Counter()
    for e in entries:
        total[e["suite"]] += 1
        if not e["pass"]:
            failed[e["suite"]] += 1
    out = []
    for s in SUITES:
        if total[s]:
            verdict = "PASS" if not failed[s] else "FAIL"
            out.append(f"{verdict} {s}: {total[s] - failed[s]}/{total[s]} checks")
    nfail = sum(failed.values())
    out.append(f"{'ALL PASS' if not nfail else 'FAILURES'}: {len(entries)} checks, {nfail} failed")
    return out


def cmd_run(args: argparse.Namespace) -> int:
    doc = _read_json(args.config)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if args.suite:
        doc["suites"] = list(dict.fromkeys(args.suite))
    if args.seed is not None:
        doc["seed"] = args.seed
    load_config(doc)
    entries = run_suites(doc, max(1, args.jobs))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(format_text(entries))
    for line in summary_lines(entries):
        print(line)
    return EXIT_OK if all(e["pass"] for e in entries) else EXIT_FAIL


_PRODUCT_RE = re.compile(r"\s_\(\s*(-?\d+)\s*\)\s")


def evaluate(expr: str, engine: Engine) -> str:
    """``<state> _(n) <state>`` to the canonical text of the n-th product."""
    hits = list(_PRODUCT_RE.finditer(f" {expr} "))
    if len(hits) != 1:
        raise ParseError("expected exactly one ' _(n) ' between two states")
    text = f" {expr} "
    m = hits[0]
    a = engine.parse_state(text[: m.start()])
    b = engine.parse_state(text[m.end():])
    return engine.format_state(engine.nth_product(a, int(m.group(1)), b))


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        alg = builtin(args.algebra)
        engine = Engine(EngineConfig(args.N, alg, Fraction(args.c)))
    except (LieDataError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from None
    print(evaluate(args.expr, engine))
    return EXIT_OK


def cmd_char(args: argparse.Namespace) -> int:
    module = load_verma(args.config)
    values = brute_force_character(module) if args.brute else module_character(module)
    print(json.dumps(values))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="engine", description="Exact vertex algebra verification engine.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run verification suites from a JSON config")
    r.add_argument("config")
    r.add_argument("--suite", action="append", choices=SUITES, help="restrict to a suite (repeatable)")
    r.add_argument("--out", default=".", help="directory for report.txt and report.json")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    ev = sub.add_parser("eval", help='print the n-th product "<a> _(n) <b>"')
    ev.add_argument("expr")
    ev.add_argument("--N", type=int, default=2)
    ev.add_argument("--algebra", default="sl2")
    ev.add_argument("--c", default="1")
    ev.set_defaults(func=cmd_eval)

    c = sub.add_parser("char", help="print the graded character of a Verma config")
    c.add_argument("config")
    c.add_argument("--brute", action="store_true", help="count PBW monomials directly")
    c.set_defaults(func=cmd_char)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, RatFuncError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
