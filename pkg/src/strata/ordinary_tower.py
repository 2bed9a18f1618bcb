"""Stabilization tower for ordinary homology.

Going from level ``r`` to ``r + 1`` shifts every degree by one:

* the absolute group in degree ``j + 1`` is the old absolute group in degree
  ``j`` (identification ``sigma``);
* the relative group in degree ``j + 1`` is the old absolute group in degree
  ``j`` (embedded by ``embed``) plus an extra summand built from
  ``coker var_j`` and ``ker var_{j-1}``;
* ``var`` is ``sigma`` on the embedded block and zero on the extra summand;
* ``jmap(sigma a) = -embed(2a + var jmap a)``, plus the class of ``a`` in the
  cokernel block when coefficients are Z.

The relative group of a new level is presented as the block sum
``[old absolute | cokernel part | kernel part]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .exact_lin import (QQ, ZZ, FGAbGroup, GroupHom, IntMatrix, direct_sum, hom_subquotients)
from .slice_models import SliceData

SPLIT = "split"
UNRESOLVED = "unresolved"
GENERAL = "general"
HALF = "half"

SIGN_CONVENTION = ("sign convention: one stabilization step relativizes as "
                   "J(Σα) = −⇒(2α + Var∘J(α)); the opposite sign gives a monodromy of "
                   "infinite order on the smooth two-point base")


class TowerError(ValueError):
    pass


@dataclass(frozen=True)
class ExtraSummand:
    """The summand of a new relative group not coming from the old absolute group.

    It is an extension of ``kernel_part`` by ``quotient_part``; over Z the
    extension class is not determined, so the block sum is used as a stand-in
    and the flag says so.
    """

    quotient_part: FGAbGroup
    quotient_projection: IntMatrix
    kernel_part: FGAbGroup
    kernel_inclusion: IntMatrix
    extension_flag: str

    @property
    def rank(self) -> int:
        return self.quotient_part.free_rank + self.kernel_part.free_rank

    def is_trivial(self) -> bool:
        return self.quotient_part.is_trivial() and self.kernel_part.is_trivial()


@dataclass(frozen=True)
class TowerLevel:
    r: int
    m: int
    n: int
    d: int
    coeff: str
    rel_groups: Mapping[int, FGAbGroup]
    abs_groups: Mapping[int, FGAbGroup]
    var: Mapping[int, GroupHom]
    jmap: Mapping[int, GroupHom]
    sigma: Mapping[int, GroupHom] = field(default_factory=dict)
    embed: Mapping[int, GroupHom] = field(default_factory=dict)
    stab: Mapping[int, GroupHom] = field(default_factory=dict)
    extra: Mapping[int, ExtraSummand] = field(default_factory=dict)

    @property
    def embed_mode(self) -> str:
        return HALF if self.coeff == QQ else GENERAL

    def rel(self, j: int) -> FGAbGroup:
        return self.rel_groups.get(j) or FGAbGroup.trivial(self.coeff)

    def abs(self, j: int) -> FGAbGroup:
        return self.abs_groups.get(j) or FGAbGroup.trivial(self.coeff)

    def var_at(self, j: int) -> GroupHom:
        return self.var.get(j) or GroupHom.zero(self.rel(j), self.abs(j))

    def jmap_at(self, j: int) -> GroupHom:
        return self.jmap.get(j) or GroupHom.zero(self.abs(j), self.rel(j))

    def sigma_at(self, j: int, prev: TowerLevel) -> GroupHom:
        return self.sigma.get(j) or GroupHom.zero(prev.abs(j - 1), self.abs(j))

    def embed_at(self, j: int, prev: TowerLevel) -> GroupHom:
        return self.embed.get(j) or GroupHom.zero(prev.abs(j - 1), self.rel(j))

    def stab_at(self, j: int, prev: TowerLevel) -> GroupHom:
        return self.stab.get(j) or GroupHom.zero(prev.rel(j - 1), self.rel(j))

    def degrees(self) -> list[int]:
        return sorted(set(self.rel_groups) | set(self.abs_groups))

    def monodromy_abs(self, j: int) -> GroupHom:
        return GroupHom.identity(self.abs(j)) + self.var_at(j).compose(self.jmap_at(j))

    def monodromy_rel(self, j: int) -> GroupHom:
        return GroupHom.identity(self.rel(j)) + self.jmap_at(j).compose(self.var_at(j))

    def is_extension_resolved(self) -> bool:
        return all(e.extension_flag == SPLIT for e in self.extra.values())

    def embed_matrix(self, j: int, prev: TowerLevel, mode: str) -> IntMatrix:
        """Matrix of the embedding of ``prev.abs(j-1)`` in the requested realization.

        The basis realization is ``half`` over Q and ``general`` over Z; they
        differ by half the class in the cokernel block.
        """
        base = self.embed_at(j, prev).matrix
        if mode == self.embed_mode:
            return base
        if mode == HALF and self.coeff == ZZ:
            raise TowerError("the half realization needs coefficients in which 2 is invertible")
        ex = self.extra.get(j)
        if ex is None or ex.quotient_part.ngens == 0:
            return base
        q_inj = _block_injection(self.rel(j), prev.abs(j - 1).ngens, ex.quotient_part.ngens)
        shift = (q_inj @ ex.quotient_projection).scale(Fraction(1, 2))
        return base + shift if mode == GENERAL else base - shift


def _block_injection(total: FGAbGroup, offset: int, size: int) -> IntMatrix:
    return IntMatrix([[int(i == offset + j) for j in range(size)] for i in range(total.ngens)],
                     rows=total.ngens, cols=size)


def base_level(s: SliceData, n: int | None = None) -> TowerLevel:
    n = s.n if n is None else n
    degs = s.degrees()
    return TowerLevel(
        r=s.m, m=s.m, n=n, d=s.d, coeff=s.coeff,
        rel_groups={j: s.rel(j) for j in degs if s.rel(j).ngens},
        abs_groups={j: s.abs(j) for j in degs if s.abs(j).ngens},
        var={j: s.var_at(j) for j in degs if s.var_at(j).matrix.rows and s.var_at(j).matrix.cols},
        jmap={j: s.jmap_at(j) for j in degs if s.jmap_at(j).matrix.rows and s.jmap_at(j).matrix.cols},
    )


def stabilize_step(level: TowerLevel) -> TowerLevel:
    """Compute the level ``r + 1`` from level ``r``."""
    if level.r + 1 > level.n:
        raise TowerError(f"cannot stabilize past the ambient dimension n={level.n}")
    ring = level.coeff
    degs = level.degrees()
    subs = {j: hom_subquotients(level.var_at(j)) for j in degs}
    new_rel, new_abs, new_var, new_jmap = {}, {}, {}, {}
    sigma, embed, stab, extra = {}, {}, {}, {}
    candidates = sorted({j + 1 for j in degs} | {j + 2 for j in degs})
    for J in candidates:
        A = level.abs(J - 1)
        if J - 1 in subs:
            Q, P = subs[J - 1].cokernel, subs[J - 1].cokernel_projection.matrix
        else:
            Q, P = FGAbGroup.trivial(ring), IntMatrix.zeros(0, A.ngens)
        if J - 2 in subs:
            K, K_inc = subs[J - 2].kernel, subs[J - 2].kernel_inclusion.matrix
        else:
            K, K_inc = FGAbGroup.trivial(ring), IntMatrix.zeros(level.rel(J - 2).ngens, 0)
        if A.ngens == 0 and Q.ngens == 0 and K.ngens == 0:
            continue
        bp = direct_sum(A, Q, K)
        R = bp.group
        a, q, k = A.ngens, Q.ngens, K.ngens
        flag = SPLIT if (ring == QQ or K.is_free() or Q.is_trivial()) else UNRESOLVED
        extra[J] = ExtraSummand(Q, P, K, K_inc, flag)
        new_rel[J] = R
        if a:
            new_abs[J] = A
        var_m = IntMatrix.identity(a).hstack(IntMatrix.zeros(a, q + k))
        new_var[J] = GroupHom(R, A, var_m)

        vj = level.var_at(J - 1).compose(level.jmap_at(J - 1)).matrix
        top = (IntMatrix.identity(a).scale(2) + vj).scale(-1)
        corr = P if ring == ZZ else IntMatrix.zeros(q, a)
        new_jmap[J] = GroupHom(A, R, top.vstack(corr, IntMatrix.zeros(k, a)))

        sigma[J] = GroupHom.identity(A)
        embed[J] = bp.injections[0]
        stab[J] = bp.injections[0].compose(level.var_at(J - 1))
    return TowerLevel(r=level.r + 1, m=level.m, n=level.n, d=level.d, coeff=ring,
                      rel_groups=new_rel, abs_groups=new_abs, var=new_var, jmap=new_jmap,
                      sigma=sigma, embed=embed, stab=stab, extra=extra)


def build_tower(s: SliceData, n: int | None = None) -> list[TowerLevel]:
    """Levels ``r = m, ..., n`` starting from the slice itself."""
    n = s.n if n is None else n
    if n < s.m:
        raise TowerError(f"ambient dimension n={n} is below the slice dimension m={s.m}")
    levels = [base_level(s, n)]
    while levels[-1].r < n:
        levels.append(stabilize_step(levels[-1]))
    return levels


def level_at(tower: list[TowerLevel], r: int) -> TowerLevel:
    return tower[r - tower[0].r]


# -- operators built from a level ---------------------------------------------------------


def iterated_variation(level: TowerLevel, s: int) -> dict[int, GroupHom]:
    """Variation along the ``s``-fold loop: ``var ∘ (1 + M + ... + M^(s-1))`` on relative groups."""
    if s < 0:
        raise ValueError("iteration count must be >= 0")
    out = {}
    for j in level.degrees():
        mon = level.monodromy_rel(j)
        acc = GroupHom.zero(level.rel(j), level.rel(j))
        power = GroupHom.identity(level.rel(j))
        for _ in range(s):
            acc = acc + power
            power = mon.compose(power)
        out[j] = level.var_at(j).compose(acc)
    return out


def global_monodromy(level: TowerLevel, j: int, restr: GroupHom, incl: GroupHom) -> GroupHom:
    """``id + incl ∘ var ∘ restr`` on an ambient group in degree ``j``."""
    var = level.var_at(j)
    if restr.target.ngens != var.source.ngens or incl.source.ngens != var.target.ngens:
        raise TowerError("restriction/inclusion do not match the local groups in this degree")
    if restr.source.ngens != incl.target.ngens:
        raise TowerError("restriction and inclusion must share the ambient group")
    inner = GroupHom(restr.source, var.source, restr.matrix)
    outer = GroupHom(var.target, incl.target, incl.matrix)
    return GroupHom.identity(restr.source) + outer.compose(var.compose(inner))


def stab_power(tower: list[TowerLevel], r: int, l: int, j: int) -> GroupHom:
    """``stab^l`` from ``rel_j(r)`` to ``rel_{j+l}(r+l)``."""
    out = GroupHom.identity(level_at(tower, r).rel(j))
    for t in range(l):
        prev, cur = level_at(tower, r + t), level_at(tower, r + t + 1)
        out = cur.stab_at(j + t + 1, prev).compose(out)
    return out


def sigma_power(tower: list[TowerLevel], r: int, l: int, j: int) -> GroupHom:
    out = GroupHom.identity(level_at(tower, r).abs(j))
    for t in range(l):
        prev, cur = level_at(tower, r + t), level_at(tower, r + t + 1)
        out = cur.sigma_at(j + t + 1, prev).compose(out)
    return out


# -- link complement -----------------------------------------------------------------------


@dataclass(frozen=True)
class LinkGroup:
    """Extension ``0 -> coker var_i -> H_i -> ker var_{i-1} -> 0``."""

    degree: int
    cokernel_part: FGAbGroup
    kernel_part: FGAbGroup
    free_rank: int
    torsion_lower: int
    torsion_upper: int
    resolved: bool

    @property
    def rank(self) -> int:
        return self.free_rank

    def describe(self) -> str:
        if self.resolved:
            parts = [self.cokernel_part.describe(), self.kernel_part.describe()]
            parts = [p for p in parts if p != "0"]
            return " + ".join(parts) or "0"
        return (f"rank {self.free_rank}, torsion order in [{self.torsion_lower}, "
                f"{self.torsion_upper}] (extension unresolved)")


def link_complement_homology(s: SliceData) -> dict[int, LinkGroup]:
    """Homology of the punctured neighbourhood, assembled from ``coker var`` and ``ker var``."""
    level = base_level(s)
    subs = {j: hom_subquotients(level.var_at(j)) for j in level.degrees()}
    out = {}
    for i in sorted(set(subs) | {j + 1 for j in subs}):
        cok = subs[i].cokernel if i in subs else FGAbGroup.trivial(s.coeff)
        ker = subs[i - 1].kernel if i - 1 in subs else FGAbGroup.trivial(s.coeff)
        if cok.is_trivial() and ker.is_trivial():
            continue
        resolved = s.coeff == QQ or ker.is_free() or cok.is_trivial()
        out[i] = LinkGroup(i, cok, ker, cok.free_rank + ker.free_rank, cok.torsion_order,
                           cok.torsion_order * ker.torsion_order, resolved)
    return out


# -- periodicity ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    name: str
    level: int
    degree: int | None
    passed: bool
    witness: str = ""


@dataclass(frozen=True)
class PeriodicityVerdict:
    applicable: bool
    start: int | None
    per_level: tuple[tuple[int, bool], ...]
    results: tuple[IdentityResult, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


def var_is_iso(level: TowerLevel) -> bool:
    return all(level.var_at(j).is_isomorphism() for j in level.degrees())


def periodicity_check(tower: list[TowerLevel]) -> PeriodicityVerdict:
    """Once some ``var_r`` is an isomorphism, check the periodicity identities from there on."""
    per_level = tuple((lv.r, var_is_iso(lv)) for lv in tower)
    start = next((r for r, ok in per_level if ok), None)
    if start is None:
        return PeriodicityVerdict(False, None, per_level)
    results: list[IdentityResult] = []
    n = tower[-1].r
    for s in range(start, n + 1):
        lv = level_at(tower, s)
        results.append(IdentityResult("Var iso", s, None, var_is_iso(lv)))
        if s < n:
            nxt = level_at(tower, s + 1)
            ok = all(nxt.stab_at(j + 1, lv).is_isomorphism() for j in lv.degrees())
            results.append(IdentityResult("stab iso (degree 1)", s, None, ok))
        if s <= n - 2:
            for j in lv.degrees():
                st2 = stab_power(tower, s, 2, j)
                sg2 = sigma_power(tower, s, 2, j)
                far = level_at(tower, s + 2)
                lhs = far.var_at(j + 2).compose(st2)
                rhs = sg2.compose(lv.var_at(j))
                bad = lhs.first_difference(rhs)
                results.append(IdentityResult("Var∘stab² = Σ²∘Var", s, j, bad is None,
                                              "" if bad is None else f"generator {bad}"))
                lhs = far.jmap_at(j + 2).compose(sg2)
                rhs = st2.compose(lv.jmap_at(j))
                bad = lhs.first_difference(rhs)
                results.append(IdentityResult("J∘Σ² = stab²∘J", s, j, bad is None,
                                              "" if bad is None else f"generator {bad}"))
    return PeriodicityVerdict(True, start, per_level, tuple(results))


# -- the irreducible curve-germ tower ---------------------------------------------------------


def _unit(n: int, i: int) -> tuple:
    return tuple(int(t == i) for t in range(n))


@dataclass(frozen=True)
class GermReportCheck:
    label: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class IrreducibleGermReport:
    nu: int
    n: int
    rel_group: FGAbGroup
    abs_group: FGAbGroup
    gammas: tuple[tuple, ...]
    case: str
    checks: tuple[GermReportCheck, ...]
    formula_classes: tuple[tuple, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _images_generate(vectors: list[tuple], group: FGAbGroup) -> bool:
    src = FGAbGroup.free(len(vectors), group.ring)
    h = GroupHom(src, group, IntMatrix.from_columns(vectors, group.ngens))
    return hom_subquotients(h).cokernel.is_trivial()


def irreducible_germ_report(nu: int, n: int, coeff: str = ZZ) -> IrreducibleGermReport:
    """Stabilize the ``nu``-point cyclic slice of an irreducible plane curve germ to level ``n``.

    Reports the classes ``Γ_j = stab^{n-2}(γ_j)``, their single relation, the
    shapes of the top relative and absolute groups, and the parity behaviour of
    iterated variations.
    """
    from .slice_models import curve_germ_slice

    if nu < 1 or n < 3:
        raise ValueError("need nu >= 1 and n >= 3")
    tower = build_tower(curve_germ_slice((nu,), n=n, coeff=coeff), n)
    top = tower[-1]
    jt = n - 2
    H_rel, H_abs = top.rel(jt), top.abs(jt)
    g0 = tower[0].rel(0).ngens
    gamma = [_unit(g0, i) for i in range(g0)] + [tuple(-1 for _ in range(g0))]
    stab = stab_power(tower, 2, n - 2, 0)
    Gam = [stab(g) for g in gamma]
    checks: list[GermReportCheck] = []

    def add(label, ok, detail=""):
        checks.append(GermReportCheck(label, bool(ok), detail))

    expect = FGAbGroup.free(nu - 1, coeff)
    add(f"H̄_{jt}({n}) ≅ {expect.describe()}", H_rel.isomorphic(expect), H_rel.describe())
    add(f"H_{jt}({n}) ≅ {expect.describe()}", H_abs.isomorphic(expect), H_abs.describe())
    total = tuple(sum(col) for col in zip(*Gam)) if Gam else ()
    names = "+".join(f"Γ{_subscript(j + 1)}" for j in range(nu))
    add(f"{names} = 0", H_rel.contains(total) if total else True)
    add("Γ_j generate H̄", _images_generate(Gam, H_rel) if Gam else H_rel.is_trivial())
    sig = sigma_power(tower, 2, n - 2, 0)
    q = [sig(_diff(g0, (j + 1) % nu, j)) for j in range(nu)]
    add("Σ^{n-2}(γ_{j+1} − γ_j) generate H", _images_generate(q, H_abs) if q else H_abs.is_trivial())

    var_top = top.var_at(jt)
    formula: list[tuple] = []
    if n % 2 == 0:
        case = "n even"
        it = iterated_variation(top, nu)[jt] if jt in top.degrees() else None
        add(f"{nu}-fold iterated variation ≡ 0", it is None or it.is_zero())
        mon = top.monodromy_rel(jt) ** nu if jt in top.degrees() else None
        add(f"M̄^{nu} fixes every Γ_j",
            mon is None or all(H_rel.contains(_sub(mon(g), g)) for g in Gam))
    elif nu % 2 == 1:
        case = "n odd, ν odd"
        it = iterated_variation(top, 2 * nu)[jt] if jt in top.degrees() else None
        add(f"{2 * nu}-fold iterated variation ≡ 0", it is None or it.is_zero())
    else:
        case = "n odd, ν even"
        jm = top.jmap_at(jt)
        it = iterated_variation(top, nu)[jt]
        for j in range(nu):
            cls = [0] * H_abs.ngens
            for t in range(0, nu, 2):
                v = q[(j + t) % nu]
                cls = [a + b for a, b in zip(cls, v)]
            formula.append(tuple(cls))
        add("alternating class is zero in H̄", all(H_rel.contains(jm(c)) for c in formula))
        add(f"{nu}-fold iterated variation of Γ_j = 2 × alternating class",
            all(H_abs.contains(_sub(it(Gam[j]), tuple(2 * x for x in formula[j])))
                for j in range(nu)))
        if nu == 2:
            add("Var(Γ_j) = alternating class",
                all(H_abs.contains(_sub(var_top(Gam[j]), formula[j])) for j in range(nu)))
    return IrreducibleGermReport(nu, n, H_rel, H_abs, tuple(Gam), case, tuple(checks),
                                 tuple(formula))


def _subscript(k: int) -> str:
    return "".join("₀₁₂₃₄₅₆₇₈₉"[int(c)] for c in str(k))


def _sub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _diff(g0, hi, lo) -> tuple:
    # reduced class γ_hi − γ_lo in the absolute basis p_t − p_1
    y = [0] * (g0 + 1)
    y[hi] += 1
    y[lo] -= 1
    return tuple(y[1:])
