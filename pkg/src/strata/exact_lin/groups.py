"""Finitely generated abelian groups carried as presentations.

A group is ``R^g / (column span of relations)`` for ``R`` in {Z, Q}. Groups
are never collapsed to their isomorphism type alone, so homomorphisms given on
generators stay composable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .matrix import DimensionMismatch, IntMatrix, Scalar
from .normal_form import (QQ, RINGS, ZZ, SNFDecomposition, lattice_basis, normal_form, nullspace,
                          solve)


class IllDefinedHom(ValueError):
    """A homomorphism sends some relator of its source outside the target's relations."""


class RingMismatch(ValueError):
    """Objects over different coefficient rings were combined."""


def _coerce(M: IntMatrix, ring: str) -> IntMatrix:
    if ring == ZZ and not M.is_integral():
        raise ValueError("non-integer entries in a Z-module presentation")
    return M


@dataclass(frozen=True, eq=False)
class FGAbGroup:
    """``ring^ngens`` modulo the columns of ``relations``.

    >>> print(FGAbGroup(2, IntMatrix([[2, 0], [0, 3]])))
    Z/6
    """

    ngens: int
    relations: IntMatrix = None
    ring: str = ZZ

    def __post_init__(self):
        if self.ring not in RINGS:
            raise ValueError(f"unsupported coefficient ring {self.ring!r}")
        rel = self.relations
        if rel is None:
            rel = IntMatrix.zeros(self.ngens, 0)
            object.__setattr__(self, "relations", rel)
        if rel.rows != self.ngens:
            raise DimensionMismatch(
                f"relation matrix has {rel.rows} rows for {self.ngens} generators")
        _coerce(rel, self.ring)

    @classmethod
    def free(cls, n: int, ring: str = ZZ) -> FGAbGroup:
        return cls(n, IntMatrix.zeros(n, 0), ring)

    @classmethod
    def trivial(cls, ring: str = ZZ) -> FGAbGroup:
        return cls.free(0, ring)

    @cached_property
    def snf(self) -> SNFDecomposition:
        return normal_form(self.relations, self.ring)

    @property
    def relation_rank(self) -> int:
        return self.snf.rank

    @property
    def free_rank(self) -> int:
        return self.ngens - self.relation_rank

    rank = free_rank

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        if self.ring == QQ:
            return ()
        return tuple(d for d in self.snf.diagonal if d not in (0, 1))

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def is_free(self) -> bool:
        return not self.invariant_factors

    def contains(self, vec: Sequence[Scalar]) -> bool:
        """Whether ``vec`` (in generator coordinates) is zero in the group."""
        if len(vec) != self.ngens:
            raise DimensionMismatch(f"vector of length {len(vec)} in a group on {self.ngens} generators")
        if all(x == 0 for x in vec):
            return True
        if self.ring == ZZ and any(not isinstance(x, int) for x in vec):
            return False
        return solve(self.relations, vec, self.ring, self.snf) is not None

    is_zero_element = contains

    def same_ring(self, other: FGAbGroup) -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    @cached_property
    def minimized(self) -> tuple[FGAbGroup, IntMatrix, IntMatrix]:
        """An isomorphic presentation with no redundant generators.

        Returns ``(group, to_min, from_min)``: ``to_min`` sends old coordinates
        to new ones, ``from_min`` picks representatives of the new generators.
        """
        nf = self.snf
        diag = list(nf.diagonal) + [0] * (self.ngens - len(nf.diagonal))
        if self.ring == ZZ:
            keep = [i for i, d in enumerate(diag) if d != 1]
            torsion = [diag[i] for i in keep if diag[i] != 0]
        else:
            keep = [i for i, d in enumerate(diag) if d == 0]
            torsion = []
        rel = IntMatrix.diagonal(torsion, rows=len(keep), cols=len(torsion))
        group = FGAbGroup(len(keep), rel, self.ring)
        return group, nf.U.submatrix(rows=keep), nf.U_inv.submatrix(cols=keep)

    def describe(self) -> str:
        if self.is_trivial():
            return "0"
        parts = []
        f = self.free_rank
        if f:
            parts.append(self.ring if f == 1 else f"{self.ring}^{f}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts)

    __str__ = describe

    def __repr__(self) -> str:
        return f"FGAbGroup({self.ngens}, {self.relations!r}, {self.ring!r})"

    def __eq__(self, other) -> bool:
        """Equality of presentations (not mere isomorphism)."""
        if not isinstance(other, FGAbGroup):
            return NotImplemented
        return (self.ngens, self.ring, self.relations) == (other.ngens, other.ring, other.relations)

    def __hash__(self) -> int:
        return hash((self.ngens, self.ring, self.relations))

    def isomorphic(self, other: FGAbGroup) -> bool:
        return (self.ring == other.ring and self.free_rank == other.free_rank
                and self.invariant_factors == other.invariant_factors)


def group_from_presentation(generators: int, relations: IntMatrix | None = None,
                            ring: str = ZZ) -> FGAbGroup:
    """Build a group from ``generators`` and a relation matrix with one relator per column."""
    if relations is not None and relations.rows != generators:
        raise DimensionMismatch(
            f"relation matrix has {relations.rows} rows for {generators} generators")
    return FGAbGroup(generators, relations, ring)


@dataclass(frozen=True, eq=False)
class GroupHom:
    """A homomorphism given by its matrix on the chosen generators.

    Column ``i`` of ``matrix`` is the image of source generator ``i`` in target
    coordinates. Construction checks shapes only; ``is_well_defined`` checks
    that relators go to zero.
    """

    source: FGAbGroup
    target: FGAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        self.source.same_ring(self.target)
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise DimensionMismatch(
                f"matrix shape {self.matrix.shape}, expected "
                f"{(self.target.ngens, self.source.ngens)}")
        _coerce(self.matrix, self.source.ring)

    @classmethod
    def identity(cls, g: FGAbGroup) -> GroupHom:
        return cls(g, g, IntMatrix.identity(g.ngens))

    @classmethod
    def zero(cls, source: FGAbGroup, target: FGAbGroup) -> GroupHom:
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens))

    @property
    def ring(self) -> str:
        return self.source.ring

    def failing_relators(self) -> list[int]:
        rel = self.source.relations
        return [j for j in range(rel.cols) if not self.target.contains(self.matrix.apply(rel.col(j)))]

    def is_well_defined(self) -> bool:
        return not self.failing_relators()

    def __call__(self, vec: Sequence[Scalar]) -> tuple:
        return self.matrix.apply(vec)

    def compose(self, inner: GroupHom) -> GroupHom:
        """``self ∘ inner``."""
        if inner.target.ngens != self.source.ngens:
            raise DimensionMismatch("composition of homs with incompatible groups")
        return GroupHom(inner.source, self.target, self.matrix @ inner.matrix)

    def _check_parallel(self, other: GroupHom) -> None:
        if self.matrix.shape != other.matrix.shape:
            raise DimensionMismatch("homs between different groups")

    def __add__(self, other: GroupHom) -> GroupHom:
        self._check_parallel(other)
        return GroupHom(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: GroupHom) -> GroupHom:
        self._check_parallel(other)
        return GroupHom(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> GroupHom:
        return GroupHom(self.source, self.target, -self.matrix)

    def scale(self, c: Scalar) -> GroupHom:
        return GroupHom(self.source, self.target, self.matrix.scale(c))

    def __pow__(self, k: int) -> GroupHom:
        if self.source.ngens != self.target.ngens:
            raise DimensionMismatch("powers need an endomorphism")
        return GroupHom(self.source, self.target, self.matrix ** k)

    def first_difference(self, other: GroupHom) -> int | None:
        """Index of the first source generator on which the two homs differ, else ``None``."""
        self._check_parallel(other)
        diff = self.matrix - other.matrix
        for j in range(diff.cols):
            if not self.target.contains(diff.col(j)):
                return j
        return None

    def equals(self, other: GroupHom) -> bool:
        """Equality as maps of groups, i.e. modulo the target's relations."""
        return self.first_difference(other) is None

    def is_zero(self) -> bool:
        return all(self.target.contains(self.matrix.col(j)) for j in range(self.matrix.cols))

    def is_isomorphism(self) -> bool:
        sq = hom_subquotients(self)
        return sq.kernel.is_trivial() and sq.cokernel.is_trivial()

    def __repr__(self) -> str:
        return f"GroupHom({self.source} -> {self.target}, {self.matrix!r})"


@dataclass(frozen=True)
class Subquotients:
    kernel: FGAbGroup
    kernel_inclusion: GroupHom
    image: FGAbGroup
    image_inclusion: GroupHom
    cokernel: FGAbGroup
    cokernel_projection: GroupHom


def hom_subquotients(f: GroupHom) -> Subquotients:
    """Kernel, image and cokernel of ``f`` with their structure maps.

    All three come back in minimized presentations.
    """
    bad = f.failing_relators()
    if bad:
        raise IllDefinedHom(f"relator {bad[0]} of the source is not sent into the target relations")
    A, B, ring = f.source, f.target, f.ring
    a = A.ngens
    # preimage of the relation lattice of B
    W = f.matrix.hstack(-B.relations)
    N = nullspace(W, ring)
    L = lattice_basis(N.submatrix(rows=range(a)), ring)
    S_cols = []
    for j in range(A.relations.cols):
        x = solve(L, A.relations.col(j), ring)
        assert x is not None, "source relations must lie in the preimage lattice"
        S_cols.append(x)
    ker_raw = FGAbGroup(L.cols, IntMatrix.from_columns(S_cols, L.cols), ring)
    ker, _, ker_from = ker_raw.minimized
    kernel_inclusion = GroupHom(ker, A, L @ ker_from)

    im_raw = FGAbGroup(a, L, ring)
    im, _, im_from = im_raw.minimized
    image_inclusion = GroupHom(im, B, f.matrix @ im_from)

    cok_raw = FGAbGroup(B.ngens, B.relations.hstack(f.matrix), ring)
    cok, cok_to, _ = cok_raw.minimized
    cokernel_projection = GroupHom(B, cok, cok_to)
    return Subquotients(ker, kernel_inclusion, im, image_inclusion, cok, cokernel_projection)


@dataclass(frozen=True)
class BiProduct:
    group: FGAbGroup
    injections: tuple[GroupHom, ...]
    projections: tuple[GroupHom, ...]
    offsets: tuple[int, ...] = field(default=())


def direct_sum(*groups: FGAbGroup) -> BiProduct:
    """Direct sum with canonical injections and projections (block presentation)."""
    if not groups:
        raise ValueError("direct_sum needs at least one group")
    ring = groups[0].ring
    for g in groups[1:]:
        groups[0].same_ring(g)
    total = FGAbGroup(sum(g.ngens for g in groups),
                      IntMatrix.block_diag(*(g.relations for g in groups)), ring)
    injections, projections, offsets = [], [], []
    off = 0
    for g in groups:
        sel = IntMatrix([[int(i == off + j) for j in range(g.ngens)] for i in range(total.ngens)],
                        rows=total.ngens, cols=g.ngens)
        injections.append(GroupHom(g, total, sel))
        projections.append(GroupHom(total, g, sel.T))
        offsets.append(off)
        off += g.ngens
    return BiProduct(total, tuple(injections), tuple(projections), tuple(offsets))


@dataclass(frozen=True)
class PairingVerdict:
    nondegenerate: bool
    rank: int
    left_radical: tuple[tuple, ...] = ()
    right_radical: tuple[tuple, ...] = ()


def pairing_check(P: IntMatrix, left: FGAbGroup, right: FGAbGroup) -> PairingVerdict:
    """Nondegeneracy of a bilinear pairing ``left x right -> Q`` given on free generators.

    >>> pairing_check(IntMatrix([[1, 0], [0, 0]]), FGAbGroup.free(2, "Q"),
    ...               FGAbGroup.free(2, "Q")).right_radical
    ((0, 1),)
    """
    if P.shape != (left.ngens, right.ngens):
        raise DimensionMismatch(f"pairing matrix {P.shape} for groups on "
                                f"{left.ngens} x {right.ngens} generators")
    Pq = IntMatrix([[Fraction(x) for x in row] for row in P.tolist()], rows=P.rows, cols=P.cols)
    nf = normal_form(Pq, QQ)
    r = nf.rank
    left_rad = nullspace(Pq.T, QQ).columns()
    right_rad = nullspace(Pq, QQ).columns()
    ok = r == left.free_rank == right.free_rank
    return PairingVerdict(ok, r, tuple(left_rad), tuple(right_rad))
