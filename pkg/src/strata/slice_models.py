"""Transversal-slice data: the seed of every tower.

A slice records, degree by degree, the relative and absolute reduced homology
of the slice's level set together with the variation operator
``var: rel -> abs`` and the relativization ``jmap: abs -> rel``. Geometry never
enters; only these groups and maps do.

Degrees are stored sparsely: an absent degree is the zero group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence, Union

from .exact_lin import QQ, ZZ, FGAbGroup, GroupHom, IntMatrix, pairing_check

ORDINARY = "ordinary"
IH = "ih"


def _to_ring(M: IntMatrix, ring: str) -> IntMatrix:
    if ring == QQ:
        return IntMatrix([[Fraction(x) for x in r] for r in M.tolist()], rows=M.rows, cols=M.cols)
    return M


@dataclass(frozen=True)
class SliceData:
    """Ordinary-homology slice data at level ``m = n - k``.

    ``rel_groups[j]`` is the relative group in degree ``j``, ``abs_groups[j]``
    the absolute one; ``var[j]`` and ``jmap[j]`` connect them.
    """

    n: int
    k: int
    d: int
    coeff: str
    rel_groups: Mapping[int, FGAbGroup]
    abs_groups: Mapping[int, FGAbGroup]
    var: Mapping[int, GroupHom]
    jmap: Mapping[int, GroupHom]
    label: str = ""
    notes: tuple[str, ...] = ()
    kind: str = field(default=ORDINARY, init=False)

    @property
    def m(self) -> int:
        return self.n - self.k

    def rel(self, j: int) -> FGAbGroup:
        return self.rel_groups.get(j) or FGAbGroup.trivial(self.coeff)

    def abs(self, j: int) -> FGAbGroup:
        return self.abs_groups.get(j) or FGAbGroup.trivial(self.coeff)

    def var_at(self, j: int) -> GroupHom:
        return self.var.get(j) or GroupHom.zero(self.rel(j), self.abs(j))

    def jmap_at(self, j: int) -> GroupHom:
        return self.jmap.get(j) or GroupHom.zero(self.abs(j), self.rel(j))

    def degrees(self) -> list[int]:
        return sorted(set(self.rel_groups) | set(self.abs_groups) | set(self.var) | set(self.jmap))

    def with_ambient(self, n: int) -> SliceData:
        """The same slice viewed inside an ambient space of dimension ``n``."""
        return SliceData(n, n - self.m, self.d, self.coeff, self.rel_groups, self.abs_groups,
                         self.var, self.jmap, self.label, self.notes)

    def over(self, coeff: str) -> SliceData:
        """Change coefficients; only Z -> Q (tensoring a free presentation) and no-ops are allowed."""
        if coeff == self.coeff:
            return self
        if coeff != QQ:
            raise ValueError("coefficients can only be extended from Z to Q")
        rel = {j: _group_over_q(g) for j, g in self.rel_groups.items()}
        ab = {j: _group_over_q(g) for j, g in self.abs_groups.items()}

        def lift(h: GroupHom, src, tgt) -> GroupHom:
            return GroupHom(src, tgt, _to_ring(h.matrix, QQ))

        var = {j: lift(h, rel.get(j) or FGAbGroup.trivial(QQ), ab.get(j) or FGAbGroup.trivial(QQ))
               for j, h in self.var.items()}
        jm = {j: lift(h, ab.get(j) or FGAbGroup.trivial(QQ), rel.get(j) or FGAbGroup.trivial(QQ))
              for j, h in self.jmap.items()}
        return SliceData(self.n, self.k, self.d, QQ, rel, ab, var, jm, self.label, self.notes)


def _group_over_q(g: FGAbGroup) -> FGAbGroup:
    return FGAbGroup(g.ngens, _to_ring(g.relations, QQ), QQ)


@dataclass(frozen=True)
class IHSliceData:
    """Middle-perversity intersection homology of the slice over Q.

    ``abs_groups`` holds degrees ``i <= d``, ``rel_groups`` degrees ``j >= d``.
    ``pairing[i]`` has rows indexed by ``rel_groups[2d - i]`` and columns by
    ``abs_groups[i]``.
    """

    n: int
    k: int
    d: int
    rel_groups: Mapping[int, FGAbGroup]
    abs_groups: Mapping[int, FGAbGroup]
    var: GroupHom
    jmap: GroupHom
    pairing: Mapping[int, IntMatrix]
    label: str = ""
    notes: tuple[str, ...] = ()
    coeff: str = QQ
    kind: str = field(default=IH, init=False)

    @property
    def m(self) -> int:
        return self.n - self.k

    def rel(self, j: int) -> FGAbGroup:
        return self.rel_groups.get(j) or FGAbGroup.trivial(QQ)

    def abs(self, i: int) -> FGAbGroup:
        return self.abs_groups.get(i) or FGAbGroup.trivial(QQ)

    def pairing_at(self, i: int) -> IntMatrix:
        P = self.pairing.get(i)
        if P is None:
            return IntMatrix.zeros(self.rel(2 * self.d - i).ngens, self.abs(i).ngens)
        return P

    def degrees(self) -> list[int]:
        return sorted(set(self.rel_groups) | set(self.abs_groups))

    def with_ambient(self, n: int) -> IHSliceData:
        return IHSliceData(n, n - self.m, self.d, self.rel_groups, self.abs_groups, self.var,
                           self.jmap, self.pairing, self.label, self.notes)


AnySlice = Union[SliceData, IHSliceData]


@dataclass(frozen=True)
class CurveGermSpec:
    """Branch multiplicities ``u_1, ..., u_s`` of a plane curve germ."""

    mults: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mults", tuple(int(u) for u in self.mults))
        if not self.mults:
            raise ValueError("a curve germ needs at least one branch")
        if any(u < 1 for u in self.mults):
            raise ValueError(f"branch multiplicities must be positive, got {self.mults}")

    @property
    def s(self) -> int:
        return len(self.mults)

    @property
    def u(self) -> int:
        return sum(self.mults)


# -- curve germs --------------------------------------------------------------------------


def point_monodromy(spec: CurveGermSpec) -> list[int]:
    """Permutation of the ``u`` points: each branch block is cycled in order."""
    perm, off = [], 0
    for u in spec.mults:
        perm += [off + (i + 1) % u for i in range(u)]
        off += u
    return perm


def _rel_coords(y: Sequence[int]) -> list[int]:
    # relative class of sum y_t p_t, with the last point eliminated by the fundamental class
    return [y[i] - y[-1] for i in range(len(y) - 1)]


def _abs_coords(y: Sequence[int]) -> list[int]:
    # reduced class (sum y_t = 0) in the basis p_t - p_1, t >= 2
    assert sum(y) == 0
    return list(y[1:])


def curve_germ_slice(spec: CurveGermSpec | Sequence[int], n: int = 2, coeff: str = ZZ) -> SliceData:
    """Slice of a plane curve germ: ``u`` points cyclically permuted within each branch.

    Relative basis: ``p_1..p_{u-1}`` (``p_u`` eliminated by the fundamental
    class). Absolute basis: ``p_t - p_1`` for ``t = 2..u``.

    >>> s = curve_germ_slice([2])
    >>> s.var_at(0).matrix, s.jmap_at(0).matrix
    (IntMatrix([[1]]), IntMatrix([[-2]]))
    """
    if not isinstance(spec, CurveGermSpec):
        spec = CurveGermSpec(tuple(spec))
    u = spec.u
    perm = point_monodromy(spec)
    rel = FGAbGroup.free(u - 1)
    ab = FGAbGroup.free(u - 1)
    var_cols = []
    for i in range(u - 1):
        y = [0] * u
        y[perm[i]] += 1
        y[i] -= 1
        var_cols.append(_abs_coords(y))
    jmap_cols = []
    for t in range(1, u):
        y = [0] * u
        y[t] += 1
        y[0] -= 1
        jmap_cols.append(_rel_coords(y))
    var = GroupHom(rel, ab, IntMatrix.from_columns(var_cols, u - 1))
    jmap = GroupHom(ab, rel, IntMatrix.from_columns(jmap_cols, u - 1))
    mults = ",".join(map(str, spec.mults))
    out = SliceData(n=n, k=n - 2, d=0, coeff=ZZ, rel_groups={0: rel}, abs_groups={0: ab},
                    var={0: var}, jmap={0: jmap}, label=f"curve-germ({mults})")
    return out.over(coeff)


def curve_germ_monodromy_matrix(spec: CurveGermSpec | Sequence[int]) -> IntMatrix:
    """Monodromy on the relative group, straight from the point permutation."""
    if not isinstance(spec, CurveGermSpec):
        spec = CurveGermSpec(tuple(spec))
    perm = point_monodromy(spec)
    cols = []
    for i in range(spec.u - 1):
        y = [0] * spec.u
        y[perm[i]] = 1
        cols.append(_rel_coords(y))
    return IntMatrix.from_columns(cols, spec.u - 1)


def curve_germ_order(spec: CurveGermSpec | Sequence[int]) -> int:
    mults = spec.mults if isinstance(spec, CurveGermSpec) else tuple(spec)
    return lcm(*mults)


def curve_germ_pairing(u: int) -> IntMatrix:
    """Intersection index of relative point classes with reduced absolute ones."""
    return IntMatrix([[int(i == t) - int(i == 0) for t in range(1, u)] for i in range(u - 1)],
                     rows=u - 1, cols=u - 1)


# -- transverse Morse point ----------------------------------------------------------------

MORSE_JMAP_NOTE = ("transverse Morse slice: relativization taken as 0 for odd m and -2 for even m "
                   "(a convention; only the variation is prescribed)")


def transverse_morse_slice(m: int, n: int | None = None, coeff: str = ZZ) -> SliceData:
    """Rank-one slice in degree ``m - 2``: var 0 / jmap -2 for even m, var 2 / jmap 0 for odd m."""
    if m < 2:
        raise ValueError(f"transverse Morse slice needs m >= 2, got {m}")
    n = m if n is None else n
    d = m - 2
    g = FGAbGroup.free(1)
    if m % 2 == 0:
        v, j = 0, -2
    else:
        v, j = 2, 0
    out = SliceData(n=n, k=n - m, d=d, coeff=ZZ, rel_groups={d: g}, abs_groups={d: g},
                    var={d: GroupHom(g, g, IntMatrix([[v]]))},
                    jmap={d: GroupHom(g, g, IntMatrix([[j]]))},
                    label=f"morse(m={m})", notes=(MORSE_JMAP_NOTE,))
    return out.over(coeff)


def smooth_pl_base_slice(n: int = 1, coeff: str = ZZ) -> SliceData:
    """Two points swapped by monodromy, read as a level-1 slice of a smooth hypersurface."""
    base = curve_germ_slice(CurveGermSpec((2,)), n=2, coeff=coeff)
    return SliceData(n=n, k=n - 1, d=0, coeff=base.coeff, rel_groups=base.rel_groups,
                     abs_groups=base.abs_groups, var=base.var, jmap=base.jmap,
                     label="smooth-base")


# -- intersection-homology versions of the built-in examples ---------------------------------


def ih_slice_from_ordinary(s: SliceData, pairing: IntMatrix) -> IHSliceData:
    """Read an ordinary slice concentrated in degree ``d`` as IH data over Q.

    Valid when the level set is nonsingular, so its intersection homology is
    its ordinary homology.
    """
    q = s.over(QQ)
    d = q.d
    return IHSliceData(n=q.n, k=q.k, d=d, rel_groups={d: q.rel(d)}, abs_groups={d: q.abs(d)},
                       var=q.var_at(d), jmap=q.jmap_at(d),
                       pairing={d: _to_ring(pairing, QQ)}, label=q.label, notes=q.notes)


def curve_germ_ih_slice(spec, n: int = 2) -> IHSliceData:
    s = curve_germ_slice(spec, n=n)
    return ih_slice_from_ordinary(s, curve_germ_pairing(s.rel(0).ngens + 1))


def smooth_base_ih_slice(n: int = 1) -> IHSliceData:
    return ih_slice_from_ordinary(smooth_pl_base_slice(n), curve_germ_pairing(2))


def morse_ih_slice(m: int, n: int | None = None) -> IHSliceData:
    return ih_slice_from_ordinary(transverse_morse_slice(m, n), IntMatrix([[1]]))


# -- validation ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    degree: int | None
    group: str
    message: str

    def __str__(self) -> str:
        where = f" degree {self.degree}" if self.degree is not None else ""
        return f"{self.rule}:{where} [{self.group}] {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def _nonzero(g: FGAbGroup | None) -> bool:
    return g is not None and not g.is_trivial()


def _check_hom(out: list, name: str, j: int, h: GroupHom, src: FGAbGroup, tgt: FGAbGroup) -> None:
    if h.matrix.shape != (tgt.ngens, src.ngens):
        out.append(Violation("operator shape", j, name,
                             f"matrix is {h.matrix.shape}, groups need {(tgt.ngens, src.ngens)}"))
        return
    bad = h.failing_relators()
    if bad:
        out.append(Violation("well-defined hom", j, name,
                             f"relator {bad[0]} of the source is not sent to zero"))


def _validate_ordinary(s: SliceData) -> list[Violation]:
    out: list[Violation] = []
    if not (1 <= s.m <= s.n):
        out.append(Violation("slice dimension", None, "n,k", f"need 1 <= m <= n, got m={s.m}, n={s.n}"))
    if s.d < 0:
        out.append(Violation("slice dimension", None, "d", f"d must be >= 0, got {s.d}"))
    for name, groups in (("rel", s.rel_groups), ("abs", s.abs_groups)):
        for j, g in sorted(groups.items()):
            if g.ring != s.coeff:
                out.append(Violation("coefficient ring", j, name, f"group over {g.ring}, slice over {s.coeff}"))
            if _nonzero(g) and not 0 <= j <= 2 * s.d:
                out.append(Violation("degree range", j, name, f"nonzero group outside [0, {2 * s.d}]"))
    for j, g in sorted(s.abs_groups.items()):
        if _nonzero(g) and j > s.d:
            out.append(Violation("Proposition 2 range", j, "abs",
                                 f"absolute group {g} must vanish above degree d={s.d}"))
    for j, h in sorted(s.var.items()):
        _check_hom(out, "var", j, h, s.rel(j), s.abs(j))
    for j, h in sorted(s.jmap.items()):
        _check_hom(out, "jmap", j, h, s.abs(j), s.rel(j))
    return out


def _validate_ih(s: IHSliceData) -> list[Violation]:
    out: list[Violation] = []
    d = s.d
    if not (1 <= s.m <= s.n):
        out.append(Violation("slice dimension", None, "n,k", f"need 1 <= m <= n, got m={s.m}, n={s.n}"))
    if d < 0:
        out.append(Violation("slice dimension", None, "d", f"d must be >= 0, got {d}"))
    for name, groups in (("rel", s.rel_groups), ("abs", s.abs_groups)):
        for j, g in sorted(groups.items()):
            if g.ring != QQ:
                out.append(Violation("coefficient ring", j, name, "intersection homology needs Q"))
            if g.relations.cols and not g.relations.is_zero():
                out.append(Violation("free presentation", j, name,
                                     "intersection homology groups must be given as free Q-modules"))
            if _nonzero(g) and not 0 <= j <= 2 * d:
                out.append(Violation("degree range", j, name, f"nonzero group outside [0, {2 * d}]"))
    for i, g in sorted(s.abs_groups.items()):
        if _nonzero(g) and i > d:
            out.append(Violation("Proposition 2 range", i, "abs", f"IH_{i} must vanish above d={d}"))
    for j, g in sorted(s.rel_groups.items()):
        if _nonzero(g) and j < d:
            out.append(Violation("Proposition 2 range", j, "rel", f"relative IH_{j} must vanish below d={d}"))
    _check_hom(out, "var", d, s.var, s.rel(d), s.abs(d))
    _check_hom(out, "jmap", d, s.jmap, s.abs(d), s.rel(d))
    for i in range(0, d + 1):
        left, right = s.rel(2 * d - i), s.abs(i)
        P = s.pairing_at(i)
        if P.shape != (left.ngens, right.ngens):
            out.append(Violation("pairing shape", i, "pairing",
                                 f"matrix is {P.shape}, groups need {(left.ngens, right.ngens)}"))
            continue
        if left.is_trivial() and right.is_trivial():
            continue
        verdict = pairing_check(P, left, right)
        if not verdict.nondegenerate:
            out.append(Violation("nondegenerate pairing", i, "pairing",
                                 f"rank {verdict.rank} pairing between groups of dimension "
                                 f"{left.free_rank} and {right.free_rank}"))
    for i in s.pairing:
        if i > d or i < 0:
            out.append(Violation("pairing shape", i, "pairing", f"pairing degree outside [0, {d}]"))
    return out


def validate_slice(s: AnySlice) -> ValidationResult:
    """Check vanishing ranges, well-definedness of operators and (for IH) the pairings.

    Never raises; every violated rule is listed with its degree and group.
    """
    found = _validate_ih(s) if isinstance(s, IHSliceData) else _validate_ordinary(s)
    return ValidationResult(tuple(found))
