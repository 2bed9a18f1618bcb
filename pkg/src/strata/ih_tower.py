"""Stabilization of intersection homology over Q.

Everything at level ``m + l`` is expressed through the slice in closed form.
Write ``V = Var_m`` on ``IH̄_d(m)`` and pick the pivot columns ``C`` of ``V``
(greedy, left to right). The middle groups at every level ``l >= 1`` share
the basis indexed by ``C``:

* ``IH̄_{d+l}(m+l) = IH̄_d(m) / Ker V`` with basis ``stab^l(e_c)``;
* ``IH_{d+l}(m+l) = Im V`` with basis ``∞^l(e_c) <-> V e_c``.

``q`` is the coordinate map ``IH̄_d(m) -> k^C`` with ``V = V_C q``; it is the
matrix of both ``stab^l`` and ``∞^l``. The remaining nonzero groups are the
slice groups themselves (low absolute degrees, high relative degrees), the
cokernel ``IH_d(m) / Im V`` and the kernel ``Ker V`` in degree ``d + 2l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_lin import QQ, FGAbGroup, GroupHom, IntMatrix, nullspace, pairing_check, rank, solve
from .exact_lin.matrix import DimensionMismatch
from .ordinary_tower import TowerLevel, level_at, sigma_power, stab_power
from .slice_models import IHSliceData, validate_slice

STAB = "stab"
LOW = "low"
KERNEL = "kernel"


class IHTowerError(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


def pairing_sign(l: int, d: int) -> int:
    """``(-1)^(l*d + l(l-1)/2)``, the sign picked up by the middle pairing after ``l`` steps."""
    return -1 if (l * d + l * (l - 1) // 2) % 2 else 1


@dataclass(frozen=True)
class MiddleData:
    """Bases derived once from ``Var_m``; shared by every level of the tower."""

    pivots: tuple[int, ...]
    image_basis: IntMatrix       # V_C, columns span Im V inside IH_d(m)
    coords: IntMatrix            # q, with V = V_C q
    kernel_basis: IntMatrix      # columns span Ker V inside IH̄_d(m)
    complement: IntMatrix        # standard vectors completing V_C to a basis of IH_d(m)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def middle_data(s: IHSliceData) -> MiddleData:
    V = s.var.matrix
    pivots: list[int] = []
    for j in range(V.cols):
        if rank(V.submatrix(cols=pivots + [j])) > len(pivots):
            pivots.append(j)
    VC = V.submatrix(cols=pivots)
    cols = []
    for j in range(V.cols):
        x = solve(VC, V.col(j), QQ)
        assert x is not None
        cols.append(x)
    q = IntMatrix.from_columns(cols, len(pivots)) if cols else IntMatrix.zeros(len(pivots), 0)
    K = nullspace(V, QQ)
    comp: list[int] = []
    basis = VC
    for i in range(V.rows):
        e = IntMatrix.column([int(t == i) for t in range(V.rows)])
        trial = basis.hstack(e)
        if rank(trial) > basis.cols:
            comp.append(i)
            basis = trial
    W = IntMatrix.from_columns([[int(t == i) for t in range(V.rows)] for i in comp], V.rows)
    return MiddleData(tuple(pivots), VC, q, K, W)


@dataclass(frozen=True)
class IHTowerLevel:
    """Groups and operators of intersection homology at level ``m + l``.

    ``abs_groups[i]`` for ``i < d`` and ``rel_groups[j]`` for ``j > d + 2l``
    are the slice's own group objects, so the identifications between them
    are literally the identity.
    """

    l: int
    slice: IHSliceData
    middle: MiddleData
    rel_groups: Mapping[int, FGAbGroup]
    abs_groups: Mapping[int, FGAbGroup]
    var: GroupHom
    jmap: GroupHom
    stab_op: GroupHom
    infinity_op: GroupHom
    pairing: Mapping[int, IntMatrix] = field(default_factory=dict)

    @property
    def r(self) -> int:
        return self.slice.m + self.l

    @property
    def d(self) -> int:
        return self.slice.d

    @property
    def middle_degree(self) -> int:
        return self.slice.d + self.l

    def rel(self, j: int) -> FGAbGroup:
        return self.rel_groups.get(j) or FGAbGroup.trivial(QQ)

    def abs(self, i: int) -> FGAbGroup:
        return self.abs_groups.get(i) or FGAbGroup.trivial(QQ)

    def pairing_at(self, i: int) -> IntMatrix:
        P = self.pairing.get(i)
        if P is None:
            return IntMatrix.zeros(self.rel(2 * self.middle_degree - i).ngens, self.abs(i).ngens)
        return P

    def degrees(self) -> list[int]:
        return sorted(set(self.rel_groups) | set(self.abs_groups))

    def dimensions(self) -> dict[str, dict[int, int]]:
        return {"abs": {i: g.free_rank for i, g in sorted(self.abs_groups.items())},
                "rel": {j: g.free_rank for j, g in sorted(self.rel_groups.items())}}


def _middle_jmap(s: IHSliceData, mid: MiddleData, l: int) -> IntMatrix:
    core = mid.coords @ s.jmap.matrix @ mid.image_basis
    if l % 2:
        return -(IntMatrix.identity(mid.rank).scale(2) + core)
    return core


def ih_stabilize(s: IHSliceData, l: int, mid: MiddleData | None = None) -> IHTowerLevel:
    """Closed-form level ``m + l`` of the intersection-homology tower, ``1 <= l <= k``."""
    if not 1 <= l <= s.k:
        raise IHTowerError(f"step count l={l} outside [1, k={s.k}]")
    verdict = validate_slice(s)
    if not verdict.valid:
        raise IHTowerError("invalid slice: " + "; ".join(str(v) for v in verdict.violations))
    mid = mid or middle_data(s)
    d, r = s.d, mid.rank
    top = d + l
    mid_group = FGAbGroup.free(r, QQ)

    abs_groups = {i: g for i, g in s.abs_groups.items() if i < d}
    abs_groups[d] = FGAbGroup.free(mid.complement.cols, QQ)
    abs_groups[top] = mid_group
    rel_groups = {j + 2 * l: g for j, g in s.rel_groups.items() if j > d}
    rel_groups[top] = mid_group
    rel_groups[d + 2 * l] = FGAbGroup.free(mid.kernel_basis.cols, QQ)

    var = GroupHom.identity(mid_group)
    jmap = GroupHom(mid_group, mid_group, _middle_jmap(s, mid, l))
    stab_op = GroupHom(s.rel(d), mid_group, mid.coords)
    infinity_op = GroupHom(s.rel(d), mid_group, mid.coords)

    pairing = {i: P for i, P in s.pairing.items() if i < d}
    pairing[d] = mid.kernel_basis.T @ s.pairing_at(d) @ mid.complement
    E = IntMatrix.from_columns([[int(t == c) for t in range(s.rel(d).ngens)] for c in mid.pivots],
                               s.rel(d).ngens)
    pairing[top] = (E.T @ s.pairing_at(d) @ mid.image_basis).scale(pairing_sign(l, d))
    return IHTowerLevel(l, s, mid, rel_groups, abs_groups, var, jmap, stab_op, infinity_op, pairing)


def ih_tower(s: IHSliceData, steps: int | None = None) -> list[IHTowerLevel]:
    """Levels ``l = 1 .. steps`` (default ``k``)."""
    steps = s.k if steps is None else steps
    if steps > s.k:
        raise IHTowerError(f"requested {steps} steps but the stratum only allows k={s.k}")
    mid = middle_data(s) if steps else None
    return [ih_stabilize(s, l, mid) for l in range(1, steps + 1)]


def ih_variation(level: IHTowerLevel) -> GroupHom:
    """``Var_{m+l}`` in the middle degree: ``stab^l(α) -> ∞^l(α)``, the identity in the shared basis."""
    return level.var


def ih_relativization(level: IHTowerLevel) -> GroupHom:
    return level.jmap


def ih_step_stab(lower: IHTowerLevel, upper: IHTowerLevel) -> GroupHom:
    """``stab`` from the middle relative group at level ``l`` to level ``l + 1``."""
    if upper.l != lower.l + 1:
        raise IHTowerError("step maps connect consecutive levels only")
    return GroupHom(lower.rel(lower.middle_degree), upper.rel(upper.middle_degree),
                    IntMatrix.identity(lower.middle.rank))


def ih_step_infinity(lower: IHTowerLevel, upper: IHTowerLevel) -> GroupHom:
    """``∞`` from the middle relative group at level ``l`` to the middle absolute group at ``l + 1``."""
    if upper.l != lower.l + 1:
        raise IHTowerError("step maps connect consecutive levels only")
    return GroupHom(lower.rel(lower.middle_degree), upper.abs(upper.middle_degree),
                    IntMatrix.identity(lower.middle.rank))


def relativization_by_steps(s: IHSliceData, l: int) -> IntMatrix:
    """``J_{m+l}`` from the one-step rule ``J(∞α) = -stab(2α + J Var α)`` applied ``l`` times."""
    mid = middle_data(s)
    J = -(IntMatrix.identity(mid.rank).scale(2) + mid.coords @ s.jmap.matrix @ mid.image_basis)
    for _ in range(l - 1):
        J = -(IntMatrix.identity(mid.rank).scale(2) + J)
    return J


def _vec(x: Sequence, n: int, what: str) -> tuple:
    if len(x) != n:
        raise DegreeMismatch(f"{what} has {len(x)} coordinates, expected {n}")
    return tuple(Fraction(t) for t in x)


def ih_pairing(level: IHTowerLevel, alpha: Sequence, beta: Sequence, case: str = STAB,
               degree: int | None = None) -> Fraction:
    """Pairing at level ``m + l`` of transported slice classes.

    ``stab``: ``<stab^l α, ∞^l β>`` for ``α, β`` in ``IH̄_d(m)``.
    ``low``: ``<(I^*)^-l α, I_*^l β>`` for ``α`` in ``IH̄_{2d-i}(m)``, ``β`` in ``IH_i(m)``, ``i < d``.
    ``kernel``: the same with ``α`` in ``Ker Var_m`` and ``β`` in ``IH_d(m)``.
    """
    s, mid, d = level.slice, level.middle, level.d
    if case == STAB:
        a = _vec(alpha, s.rel(d).ngens, "alpha")
        b = _vec(beta, s.rel(d).ngens, "beta")
        x, y = level.stab_op(a), level.infinity_op(b)
        P = level.pairing_at(level.middle_degree)
    elif case == LOW:
        if degree is None or not 0 <= degree < d:
            raise DegreeMismatch(f"the low-degree case needs a degree i < d={d}, got {degree}")
        x = _vec(alpha, s.rel(2 * d - degree).ngens, "alpha")
        y = _vec(beta, s.abs(degree).ngens, "beta")
        P = level.pairing_at(degree)
    elif case == KERNEL:
        a = _vec(alpha, s.rel(d).ngens, "alpha")
        b = _vec(beta, s.abs(d).ngens, "beta")
        x = solve(mid.kernel_basis, a, QQ)
        if x is None:
            raise DegreeMismatch("alpha is not in the kernel of the variation")
        full = solve(mid.image_basis.hstack(mid.complement), b, QQ)
        y = full[mid.rank:]
        P = level.pairing_at(d)
    else:
        raise ValueError(f"unknown pairing case {case!r}")
    return sum((x[i] * P[i, j] * y[j] for i in range(len(x)) for j in range(len(y))), Fraction(0))


def transported_pairing_ok(level: IHTowerLevel) -> bool:
    """Nondegeneracy of every pairing at the level, the middle one included."""
    top = level.middle_degree
    for i in sorted(set(level.pairing) | {top}):
        left, right = level.rel(2 * top - i), level.abs(i)
        if left.is_trivial() and right.is_trivial():
            continue
        if not pairing_check(level.pairing_at(i), left, right).nondegenerate:
            return False
    return True


# -- orthogonality ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthogonalityVerdict:
    passed: bool
    witness: tuple[int, int] | None = None  # (kernel basis index, image basis index)
    value: Fraction | None = None


def orthogonality_check(s: IHSliceData) -> OrthogonalityVerdict:
    """``<Ker Var_m, Im Var_m> = 0`` under the degree-``d`` pairing."""
    mid = middle_data(s)
    G = mid.kernel_basis.T @ s.pairing_at(s.d) @ mid.image_basis
    for a in range(G.rows):
        for b in range(G.cols):
            if G[a, b] != 0:
                return OrthogonalityVerdict(False, (a, b), Fraction(G[a, b]))
    return OrthogonalityVerdict(True)


# -- comparison with ordinary homology ---------------------------------------------------------


@dataclass(frozen=True)
class RhoCheck:
    identity: int
    r: int
    l: int | None
    passed: bool
    witness: int | None = None  # first basis vector on which the two sides differ

    def label(self) -> str:
        names = {1: "Var∘ρ̄ = ρ∘Var", 2: "ρ̄∘stab^l = stab^l∘ρ̄", 3: "ρ∘∞^l = Σ^l∘Var∘ρ̄"}
        at = f"r={self.r}" + (f", l={self.l}" if self.l is not None else "")
        return f"{names[self.identity]} ({at})"


@dataclass(frozen=True)
class RhoVerdict:
    checks: tuple[RhoCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing_identities(self) -> set[int]:
        return {c.identity for c in self.checks if not c.passed}


def _first_diff(A: IntMatrix, B: IntMatrix, target: FGAbGroup) -> int | None:
    for j in range(A.cols):
        if not target.contains([a - b for a, b in zip(A.col(j), B.col(j))]):
            return j
    return None


def _compare(out: list, identity: int, r: int, l, A: IntMatrix, B: IntMatrix, target: FGAbGroup):
    if A.shape != B.shape:
        raise DimensionMismatch(f"identity {identity}: shapes {A.shape} and {B.shape} differ")
    w = _first_diff(A, B, target)
    out.append(RhoCheck(identity, r, l, w is None, w))


def rho_compatibility(ordinary: list[TowerLevel], ih: list[IHTowerLevel] | IHSliceData,
                      rho: GroupHom | IntMatrix, rho_bar: GroupHom | IntMatrix) -> RhoVerdict:
    """Check the three comparison identities between the two towers at every level.

    At level ``m`` the maps are the given ones. Higher up they are determined
    by the identities themselves on the shared basis:
    ``ρ̄_{m+a}(stab^a e_c) = stab^a ρ̄_m(e_c)`` and
    ``ρ_{m+a}(∞^a e_c) = Σ^a Var_m ρ̄_m(e_c)``; checking all identities on
    whole groups then tests the towers against each other.
    """
    if isinstance(ih, IHSliceData):
        levels = ih_tower(ih, min(ih.k, ordinary[-1].r - ordinary[0].r))
        s = ih
    else:
        levels = list(ih)
        if not levels:
            raise IHTowerError("need at least one intersection-homology level or the slice itself")
        s = levels[0].slice
    base = ordinary[0]
    if base.coeff != QQ:
        raise IHTowerError("comparison with intersection homology needs the ordinary tower over Q")
    if base.r != s.m or base.d != s.d:
        raise IHTowerError("ordinary tower and intersection-homology slice start at different levels")
    d, m = s.d, s.m
    rho_m = rho.matrix if isinstance(rho, GroupHom) else rho
    rhob_m = rho_bar.matrix if isinstance(rho_bar, GroupHom) else rho_bar
    if rho_m.shape != (base.abs(d).ngens, s.abs(d).ngens):
        raise DimensionMismatch(f"rho is {rho_m.shape}, groups need {(base.abs(d).ngens, s.abs(d).ngens)}")
    if rhob_m.shape != (base.rel(d).ngens, s.rel(d).ngens):
        raise DimensionMismatch(f"rho_bar is {rhob_m.shape}, groups need {(base.rel(d).ngens, s.rel(d).ngens)}")

    top = min(ordinary[-1].r, m + len(levels))
    mid = levels[0].middle if levels else middle_data(s)
    E = IntMatrix.from_columns([[int(t == c) for t in range(s.rel(d).ngens)] for c in mid.pivots],
                               s.rel(d).ngens)
    var_m = base.var_at(d).matrix

    # IH-side data per level a = r - m: (var, rho, rho_bar), all as matrices.
    ih_var = {0: s.var.matrix}
    rho_at = {0: rho_m}
    rhob_at = {0: rhob_m}
    for a in range(1, top - m + 1):
        ih_var[a] = IntMatrix.identity(mid.rank)
        rhob_at[a] = stab_power(ordinary, m, a, d).matrix @ rhob_m @ E
        rho_at[a] = sigma_power(ordinary, m, a, d).matrix @ var_m @ rhob_m @ E

    def ih_stab(a: int, l: int) -> IntMatrix:
        return mid.coords if a == 0 else IntMatrix.identity(mid.rank)

    out: list[RhoCheck] = []
    for r in range(m, top + 1):
        a, j = r - m, d + r - m
        lev = level_at(ordinary, r)
        _compare(out, 1, r, None, lev.var_at(j).matrix @ rhob_at[a], rho_at[a] @ ih_var[a], lev.abs(j))
        for l in range(1, top - r + 1):
            hi = level_at(ordinary, r + l)
            _compare(out, 2, r, l, rhob_at[a + l] @ ih_stab(a, l),
                     stab_power(ordinary, r, l, j).matrix @ rhob_at[a], hi.rel(j + l))
            _compare(out, 3, r, l, rho_at[a + l] @ ih_stab(a, l),
                     sigma_power(ordinary, r, l, j).matrix @ lev.var_at(j).matrix @ rhob_at[a],
                     hi.abs(j + l))
    return RhoVerdict(tuple(out))
