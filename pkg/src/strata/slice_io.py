"""Reading and writing slice scenario files (JSON, schema ``strata-slice/1``).

Output is canonical: fixed key order, degrees sorted numerically, one matrix
per line. Loading then dumping a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exact_lin import QQ, ZZ, FGAbGroup, GroupHom, IntMatrix
from .slice_models import IH, ORDINARY, AnySlice, IHSliceData, SliceData, validate_slice

log = logging.getLogger(__name__)

SCHEMA = "strata-slice/1"
_TOP_KEYS = ("schema", "kind", "label", "n", "k", "d", "coeff", "groups", "var", "jmap",
             "pairing", "notes")


class SliceFormatError(ValueError):
    """A scenario file that does not parse against the schema."""


# -- scalars and matrices --------------------------------------------------------------------


def _scalar_out(x) -> Any:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return int(x)


def _scalar_in(x, where: str, ring: str):
    if isinstance(x, bool):
        raise SliceFormatError(f"{where}: booleans are not matrix entries")
    if isinstance(x, int):
        val = x
    elif isinstance(x, str):
        try:
            val = Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SliceFormatError(f"{where}: cannot read {x!r} as an exact rational") from None
    else:
        raise SliceFormatError(f"{where}: expected an integer or a 'p/q' string, got {x!r}")
    if ring == ZZ:
        if isinstance(val, Fraction) and val.denominator != 1:
            raise SliceFormatError(f"{where}: non-integer entry {x!r} with coefficients Z")
        return int(val)
    return Fraction(val)


def _matrix_in(obj, rows: int, cols: int, where: str, ring: str) -> IntMatrix:
    if not isinstance(obj, list):
        raise SliceFormatError(f"{where}: expected an array of rows")
    if not obj and (rows == 0 or cols == 0):
        return IntMatrix.zeros(rows, cols)
    if len(obj) != rows:
        raise SliceFormatError(f"{where}: expected {rows} rows, found {len(obj)}")
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise SliceFormatError(f"{where}: row {i} should have {cols} entries, found {got}")
        out.append([_scalar_in(x, f"{where}[{i}][{j}]", ring) for j, x in enumerate(row)])
    return IntMatrix(out, rows=rows, cols=cols)


def _matrix_out(M: IntMatrix) -> list:
    if M.rows == 0 or M.cols == 0:
        return []
    return [[_scalar_out(x) for x in row] for row in M.tolist()]


def _degree(key: str, where: str) -> int:
    try:
        return int(key)
    except (TypeError, ValueError):
        raise SliceFormatError(f"{where}: degree key {key!r} is not an integer") from None


def _int_field(obj: dict, key: str) -> int:
    if key not in obj:
        raise SliceFormatError(f"missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SliceFormatError(f"field {key!r} must be an integer, got {v!r}")
    return v


# -- dict <-> slice --------------------------------------------------------------------------


def _groups_in(obj: dict, side: str, ring: str) -> dict[int, FGAbGroup]:
    out = {}
    spec = obj.get(side, {})
    if not isinstance(spec, dict):
        raise SliceFormatError(f"groups.{side}: expected an object keyed by degree")
    for key, g in spec.items():
        where = f"groups.{side}.{key}"
        j = _degree(key, where)
        if not isinstance(g, dict) or "gens" not in g:
            raise SliceFormatError(f"{where}: expected {{\"gens\": int, \"rels\": [[...]]}}")
        gens = g["gens"]
        if isinstance(gens, bool) or not isinstance(gens, int) or gens < 0:
            raise SliceFormatError(f"{where}.gens: expected a non-negative integer")
        rels = g.get("rels", [])
        if not isinstance(rels, list):
            raise SliceFormatError(f"{where}.rels: expected an array of rows")
        if not rels:
            rel = IntMatrix.zeros(gens, 0)
        else:
            ncols = len(rels[0]) if isinstance(rels[0], list) else -1
            rel = _matrix_in(rels, gens, ncols, f"{where}.rels (group {side} in degree {j})", ring)
        out[j] = FGAbGroup(gens, rel, ring)
    return out


def _homs_in(obj: dict, name: str, src: dict, tgt: dict, ring: str) -> dict[int, GroupHom]:
    out = {}
    spec = obj.get(name, {})
    if not isinstance(spec, dict):
        raise SliceFormatError(f"{name}: expected an object keyed by degree")
    triv = FGAbGroup.trivial(ring)
    for key, mat in spec.items():
        j = _degree(key, name)
        s, t = src.get(j, triv), tgt.get(j, triv)
        M = _matrix_in(mat, t.ngens, s.ngens, f"{name}.{key} ({name} in degree {j})", ring)
        out[j] = GroupHom(s, t, M)
    return out


def slice_from_dict(obj: Any) -> AnySlice:
    if not isinstance(obj, dict):
        raise SliceFormatError("top level must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise SliceFormatError(f"schema mismatch: expected {SCHEMA!r}, found {obj.get('schema')!r}")
    unknown = sorted(set(obj) - set(_TOP_KEYS))
    if unknown:
        raise SliceFormatError(f"unknown field(s): {', '.join(unknown)}")
    kind = obj.get("kind")
    if kind not in (ORDINARY, IH):
        raise SliceFormatError(f"field 'kind' must be 'ordinary' or 'ih', got {kind!r}")
    n, k, d = _int_field(obj, "n"), _int_field(obj, "k"), _int_field(obj, "d")
    coeff = obj.get("coeff")
    if coeff not in (ZZ, QQ):
        raise SliceFormatError(f"field 'coeff' must be 'Z' or 'Q', got {coeff!r}")
    groups = obj.get("groups", {})
    if not isinstance(groups, dict):
        raise SliceFormatError("groups: expected an object with 'rel' and 'abs'")
    rel = _groups_in(groups, "rel", coeff)
    ab = _groups_in(groups, "abs", coeff)
    var = _homs_in(obj, "var", rel, ab, coeff)
    jmap = _homs_in(obj, "jmap", ab, rel, coeff)
    label = obj.get("label", "")
    notes = tuple(obj.get("notes", ()))
    if kind == ORDINARY:
        if "pairing" in obj:
            raise SliceFormatError("pairing is only allowed for kind 'ih'")
        return SliceData(n, k, d, coeff, rel, ab, var, jmap, label, notes)
    if coeff != QQ:
        raise SliceFormatError("intersection homology data needs coeff 'Q'")
    triv = FGAbGroup.trivial(QQ)
    pairing = {}
    spec = obj.get("pairing", {})
    if not isinstance(spec, dict):
        raise SliceFormatError("pairing: expected an object keyed by degree")
    for key, mat in spec.items():
        i = _degree(key, "pairing")
        left, right = rel.get(2 * d - i, triv), ab.get(i, triv)
        pairing[i] = _matrix_in(mat, left.ngens, right.ngens, f"pairing.{key} (pairing in degree {i})", QQ)
    extra = sorted((set(var) | set(jmap)) - {d})
    if extra:
        raise SliceFormatError(f"var/jmap for intersection homology only in degree d={d}, found {extra}")
    v = var.get(d) or GroupHom.zero(rel.get(d, triv), ab.get(d, triv))
    jm = jmap.get(d) or GroupHom.zero(ab.get(d, triv), rel.get(d, triv))
    return IHSliceData(n, k, d, rel, ab, v, jm, pairing, label, notes)


def slice_to_dict(s: AnySlice) -> dict:
    out: dict[str, Any] = {"schema": SCHEMA, "kind": s.kind}
    if s.label:
        out["label"] = s.label
    out.update(n=s.n, k=s.k, d=s.d, coeff=s.coeff)

    def groups(gs):
        return {str(j): {"gens": g.ngens, "rels": _matrix_out(g.relations)}
                for j, g in sorted(gs.items())}

    out["groups"] = {"rel": groups(s.rel_groups), "abs": groups(s.abs_groups)}
    if isinstance(s, IHSliceData):
        out["var"] = {str(s.d): _matrix_out(s.var.matrix)}
        out["jmap"] = {str(s.d): _matrix_out(s.jmap.matrix)}
        out["pairing"] = {str(i): _matrix_out(P) for i, P in sorted(s.pairing.items())}
    else:
        out["var"] = {str(j): _matrix_out(h.matrix) for j, h in sorted(s.var.items())}
        out["jmap"] = {str(j): _matrix_out(h.matrix) for j, h in sorted(s.jmap.items())}
    if s.notes:
        out["notes"] = list(s.notes)
    return out


# -- canonical text ----------------------------------------------------------------------------


def _inline(v) -> str:
    return json.dumps(v, ensure_ascii=False, separators=(", ", ": "))


def _render(v, indent: int) -> str:
    if not isinstance(v, dict) or not v or "gens" in v:
        return _inline(v)
    pad = "  " * (indent + 1)
    items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_render(x, indent + 1)}" for k, x in v.items()]
    return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"


def dumps_slice(s: AnySlice) -> str:
    return _render(slice_to_dict(s), 0) + "\n"


def loads_slice(text: str) -> AnySlice:
    if not text.strip():
        raise SliceFormatError("empty file")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SliceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return slice_from_dict(obj)


def load_slice(path: str | Path) -> AnySlice:
    """Read a scenario file; validation problems are logged, parse problems raise."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SliceFormatError(f"{path}: {exc.strerror}") from None
    try:
        s = loads_slice(text)
    except SliceFormatError as exc:
        raise SliceFormatError(f"{path}: {exc}") from None
    for v in validate_slice(s).violations:
        log.warning("%s: %s", path, v)
    return s


def save_slice(s: AnySlice, path: str | Path) -> None:
    Path(path).write_text(dumps_slice(s), encoding="utf-8")


def slices_equal(a: AnySlice, b: AnySlice) -> bool:
    """Structural equality: same parameters, group presentations and operator matrices."""
    return slice_to_dict(a) | {"label": "", "notes": []} == slice_to_dict(b) | {"label": "", "notes": []}
