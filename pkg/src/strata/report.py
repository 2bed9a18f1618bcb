"""Plain-text and JSON renderings of a scenario run.

Both are pure functions of the run, so identical scenarios give identical
bytes. Colour is applied to verdict words only, and only on request.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import __version__
from .checks import FAIL, NA, PASS, ScenarioRun
from .exact_lin import FGAbGroup, IntMatrix
from .ih_tower import IHTowerLevel
from .ordinary_tower import TowerLevel

_COLORS = {PASS: "\x1b[32m", FAIL: "\x1b[31m", NA: "\x1b[33m"}
_RESET = "\x1b[0m"


def _verdict(status: str, color: bool) -> str:
    return f"{_COLORS[status]}{status}{_RESET}" if color else status


def _group_cell(g: FGAbGroup) -> str:
    return g.describe()


def _matrix_block(name: str, M: IntMatrix) -> list[str]:
    return [f"    {name}:", M.pretty("      ")]


def _ordinary_level(lv: TowerLevel) -> list[str]:
    out = [f"level r={lv.r} (coefficients {lv.coeff})"]
    degs = lv.degrees()
    if not degs:
        out.append("  all groups trivial")
        return out
    out.append(f"  {'degree':>6}  {'relative':<16} {'absolute'}")
    for j in degs:
        out.append(f"  {j:>6}  {_group_cell(lv.rel(j)):<16} {_group_cell(lv.abs(j)):<16}".rstrip())
    for j in degs:
        if lv.rel(j).ngens == 0 and lv.abs(j).ngens == 0:
            continue
        out.append(f"  degree {j}")
        out += _matrix_block("var", lv.var_at(j).matrix)
        out += _matrix_block("jmap", lv.jmap_at(j).matrix)
        ex = lv.extra.get(j)
        if ex is not None and not ex.is_trivial():
            out.append(f"    extra summand: cokernel part {ex.quotient_part.describe()}, "
                       f"kernel part {ex.kernel_part.describe()} ({ex.extension_flag})")
    return out


def _ih_level(lv: IHTowerLevel) -> list[str]:
    out = [f"level l={lv.l} (r={lv.r}, middle degree {lv.middle_degree})"]
    out.append(f"  {'degree':>6}  {'IH':<8} {'IH-bar'}")
    for j in lv.degrees():
        out.append(f"  {j:>6}  {lv.abs(j).free_rank:<8} {lv.rel(j).free_rank:<8}".rstrip())
    out += _matrix_block("var", lv.var.matrix)
    out += _matrix_block("jmap", lv.jmap.matrix)
    out += _matrix_block("stab^l (from the slice)", lv.stab_op.matrix)
    for i, P in sorted(lv.pairing.items()):
        out += _matrix_block(f"pairing in degree {i}", P)
    return out


def render_text(run: ScenarioRun, color: bool = False) -> str:
    sc = run.scenario
    lines = [f"strata {__version__} report"]
    if sc.name:
        lines.append(f"scenario: {sc.name}")
    lines.append(f"source: {sc.describe()}")
    s = run.ordinary or run.ih_slice
    if s is not None:
        lines.append(f"slice: {s.label or 'unnamed'} n={s.n} k={s.k} m={s.m} d={s.d} coeff={s.coeff}")
    if run.tower:
        lines += ["", "== ordinary tower =="]
        for lv in run.tower:
            lines += _ordinary_level(lv)
    if run.ih_levels:
        lines += ["", "== intersection homology tower =="]
        for lv in run.ih_levels:
            lines += _ih_level(lv)
    if run.results:
        lines += ["", "== checks =="]
        for r in run.results:
            tail = f"  ({r.witness})" if r.witness and r.status == FAIL else ""
            lines.append(f"[{r.check}] {r.label}: {_verdict(r.status, color)}{tail}")
    lines += ["", "== assumptions =="]
    lines += [f"- {a}" for a in run.assumptions] or ["- none"]
    n_pass = sum(r.status == PASS for r in run.results)
    n_fail = sum(r.status == FAIL for r in run.results)
    n_na = sum(r.status == NA for r in run.results)
    lines += ["", f"summary: {n_pass} passed, {n_fail} failed, {n_na} not applicable"]
    return "\n".join(lines) + "\n"


def _mat(M: IntMatrix) -> list:
    return [[x if isinstance(x, int) else f"{x.numerator}/{x.denominator}" for x in row]
            for row in M.tolist()] if M.rows and M.cols else []


def _grp(g: FGAbGroup) -> dict:
    return {"describe": g.describe(), "free_rank": g.free_rank,
            "invariant_factors": list(g.invariant_factors), "gens": g.ngens}


def render_json(run: ScenarioRun) -> dict[str, Any]:
    sc = run.scenario
    out: dict[str, Any] = {"version": __version__, "scenario": sc.name, "source": sc.describe()}
    out["ordinary"] = [{
        "r": lv.r,
        "degrees": {str(j): {"rel": _grp(lv.rel(j)), "abs": _grp(lv.abs(j)),
                             "var": _mat(lv.var_at(j).matrix), "jmap": _mat(lv.jmap_at(j).matrix)}
                    for j in lv.degrees()},
        "extra": {str(j): {"cokernel_part": ex.quotient_part.describe(),
                           "kernel_part": ex.kernel_part.describe(), "flag": ex.extension_flag}
                  for j, ex in sorted(lv.extra.items()) if not ex.is_trivial()},
    } for lv in run.tower]
    out["ih"] = [{
        "l": lv.l, "r": lv.r,
        "dimensions": {k: {str(j): v for j, v in d.items()} for k, d in lv.dimensions().items()},
        "var": _mat(lv.var.matrix), "jmap": _mat(lv.jmap.matrix),
        "pairing": {str(i): _mat(P) for i, P in sorted(lv.pairing.items())},
    } for lv in run.ih_levels]
    out["checks"] = [{"check": r.check, "label": r.label, "status": r.status, "witness": r.witness}
                     for r in run.results]
    out["assumptions"] = list(run.assumptions)
    out["passed"] = run.passed
    return out


def dumps_json(obj: Any) -> str:
    def default(x):
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}"
        raise TypeError(type(x).__name__)
    return json.dumps(obj, indent=2, ensure_ascii=False, default=default) + "\n"
