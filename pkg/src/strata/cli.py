"""``strata`` command line: ``tower``, ``verify`` and ``emit-example``.

Exit codes: 0 success, 1 a requested check failed, 2 the input could not be
parsed, validated or run.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .checks import (CHECK_NAMES, EXAMPLES, Scenario, ScenarioError, parse_mults, resolve,
                     run_scenario)
from .ih_tower import IHTowerError
from .ordinary_tower import TowerError
from .report import dumps_json, render_json, render_text
from .slice_io import SliceFormatError, dumps_slice

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
_INPUT_ERRORS = (ScenarioError, SliceFormatError, IHTowerError, TowerError)
_BATCH_KEYS = {"name", "example", "mults", "m", "slice", "ambient", "coeff", "ih", "steps", "checks"}


def _split_checks(text: str | Sequence[str] | None) -> tuple[str, ...]:
    if not text:
        return ()
    items = text.split(",") if isinstance(text, str) else list(text)
    return tuple(c.strip() for c in items if c.strip())


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mults", help="branch multiplicities for curve-germ, e.g. 2,1")
    p.add_argument("--m", type=int, help="slice dimension for the morse example")
    p.add_argument("--ambient", type=int, help="ambient dimension n")
    p.add_argument("--coeff", choices=("Z", "Q"), help="coefficient ring")
    p.add_argument("--ih", action="store_true", help="include intersection homology")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strata", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tower", help="build the stabilization tower and run checks")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--slice", metavar="PATH", help="scenario file")
    src.add_argument("--example", metavar="NAME", help=f"built-in example: {', '.join(EXAMPLES)}")
    _add_source_args(t)
    t.add_argument("--steps", type=int, help="intersection-homology steps (at most k)")
    t.add_argument("--check", default="", help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}")
    t.add_argument("--json", metavar="PATH", help="also write a JSON sidecar")
    t.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    v = sub.add_parser("verify", help="run a batch of scenarios")
    v.add_argument("batch", help="JSON file {\"scenarios\": [...]}")
    v.add_argument("--json", metavar="PATH", help="write per-scenario results as JSON")
    v.add_argument("--out", metavar="PATH", help="write the summary here instead of stdout")

    e = sub.add_parser("emit-example", help="write a built-in example as a scenario file")
    e.add_argument("name", help=f"one of: {', '.join(EXAMPLES)}")
    _add_source_args(e)
    e.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    return parser


def _color() -> bool:
    return os.environ.get("STRATA_COLOR", "0") == "1"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(f"strata: error: {msg}", file=sys.stderr)


def _mults(args: argparse.Namespace) -> tuple[int, ...]:
    return parse_mults(args.mults) if args.mults else ()


def cmd_tower(args: argparse.Namespace) -> int:
    try:
        sc = Scenario(example=args.example, mults=_mults(args), m=args.m, slice_path=args.slice,
                      ambient=args.ambient, coeff=args.coeff, ih=args.ih, steps=args.steps,
                      checks=_split_checks(args.check))
        run = run_scenario(sc)
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return EXIT_INPUT
    _emit(render_text(run, color=_color() and not args.out), args.out)
    if args.json:
        Path(args.json).write_text(dumps_json(render_json(run)), encoding="utf-8")
    return EXIT_OK if run.passed else EXIT_FAIL


def _scenario_from_entry(entry, base: Path, index: int) -> Scenario:
    if not isinstance(entry, dict):
        raise ScenarioError(f"scenario {index} is not an object")
    unknown = sorted(set(entry) - _BATCH_KEYS)
    if unknown:
        raise ScenarioError(f"unknown field(s) {', '.join(unknown)}")
    src = entry.get("slice")
    path = obj = None
    if isinstance(src, str):
        path = str((base / src))
    elif isinstance(src, dict):
        obj = src
    elif src is not None:
        raise ScenarioError("'slice' must be a path or an inline scenario object")
    mults = entry.get("mults", ())
    if isinstance(mults, int):
        mults = (mults,)
    mults = parse_mults(mults) if mults else ()
    return Scenario(name=str(entry.get("name", f"scenario {index + 1}")), example=entry.get("example"),
                    mults=mults, m=entry.get("m"), slice_path=path, slice_obj=obj,
                    ambient=entry.get("ambient"), coeff=entry.get("coeff"),
                    ih=bool(entry.get("ih", False)), steps=entry.get("steps"),
                    checks=_split_checks(entry.get("checks")))


def cmd_verify(args: argparse.Namespace) -> int:
    batch_path = Path(args.batch)
    try:
        data = json.loads(batch_path.read_text(encoding="utf-8"))
    except OSError as exc:
        _err(f"{batch_path}: {exc.strerror}")
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        _err(f"{batch_path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
        return EXIT_INPUT
    entries = data.get("scenarios") if isinstance(data, dict) else None
    if not isinstance(entries, list):
        _err(f"{batch_path}: expected {{\"scenarios\": [...]}}")
        return EXIT_INPUT

    lines, records = [], []
    counts = {"passed": 0, "failed": 0, "errors": 0}
    for i, entry in enumerate(entries):
        name = entry.get("name", f"scenario {i + 1}") if isinstance(entry, dict) else f"scenario {i + 1}"
        try:
            sc = _scenario_from_entry(entry, batch_path.parent, i)
            run = run_scenario(sc)
        except _INPUT_ERRORS as exc:
            counts["errors"] += 1
            lines.append(f"ERROR {name}: {exc}")
            records.append({"name": name, "status": "ERROR", "error": str(exc)})
            continue
        total = len(run.results)
        bad = [r for r in run.results if r.failed]
        if bad:
            counts["failed"] += 1
            lines.append(f"FAIL  {name}: {len(bad)}/{total} checks failed")
            lines += [f"      [{r.check}] {r.label}" for r in bad]
        else:
            counts["passed"] += 1
            lines.append(f"PASS  {name}: {total - sum(r.status == 'N/A' for r in run.results)}"
                         f"/{total} checks passed")
        records.append({"name": name, "status": "FAIL" if bad else "PASS", "report": render_json(run)})
    lines.append(f"{len(entries)} scenarios: {counts['passed']} passed, {counts['failed']} failed, "
                 f"{counts['errors']} errors")
    _emit("\n".join(lines) + "\n", args.out)
    if args.json:
        Path(args.json).write_text(dumps_json({"scenarios": records, **counts}), encoding="utf-8")
    return EXIT_OK if counts["failed"] == 0 and counts["errors"] == 0 else EXIT_FAIL


def cmd_emit_example(args: argparse.Namespace) -> int:
    if args.name == "curve-germ" and not args.mults:
        _err("curve-germ needs --mults")
        return EXIT_INPUT
    try:
        sc = Scenario(example=args.name, mults=_mults(args), m=args.m, ambient=args.ambient,
                      coeff=args.coeff)
        ordinary, ih = resolve(sc)
        if args.ih and args.coeff == "Z":
            raise ScenarioError("intersection homology is computed over Q only")
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return EXIT_INPUT
    s = ih if args.ih else ordinary
    _emit(dumps_slice(s), args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="strata: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    handler = {"tower": cmd_tower, "verify": cmd_verify, "emit-example": cmd_emit_example}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
