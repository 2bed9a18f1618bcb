"""Smith normal form over Z and rank normal form over Q.

Both are produced by one elimination routine that records the left and right
transforms together with their inverses, so kernels, lattice bases and
linear solves all fall out of a single factorization ``U @ M @ V == D``.

Pivot rule: the smallest nonzero absolute value in the remaining submatrix,
ties broken by lowest (row, col). Outputs are therefore reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import DimensionMismatch, IntMatrix, Scalar

ZZ = "Z"
QQ = "Q"
RINGS = (ZZ, QQ)


@dataclass(frozen=True)
class SNFDecomposition:
    """``U @ M @ V == D`` with ``U``, ``V`` invertible over the ring.

    Over Z the transforms are unimodular and ``D`` carries the divisibility
    chain ``d1 | d2 | ... | dk`` followed by zeros. Over Q the nonzero
    diagonal entries are all 1.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix
    source_shape: tuple[int, int]
    ring: str = ZZ

    @property
    def diagonal(self) -> tuple:
        return tuple(self.D[i, i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _eye(n: int) -> list[list]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _diagonalize(M: IntMatrix, field: bool) -> SNFDecomposition:
    m, n = M.shape
    A = M.tolist()
    if field:
        A = [[Fraction(x) for x in row] for row in A]
    U, Ui, V, Vi = _eye(m), _eye(m), _eye(n), _eye(n)

    def row_add(dst, src, c):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] -= c * row[dst]

    def col_add(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]
        Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    def row_swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i == j:
            return
        for mat in (A, V):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_scale(i, c):
        A[i] = [c * a for a in A[i]]
        U[i] = [c * a for a in U[i]]
        inv = 1 / c if field else c  # over Z, c is +-1
        for row in Ui:
            row[i] *= inv

    def find_pivot(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a != 0 and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        return best

    for t in range(min(m, n)):
        while True:
            piv = find_pivot(t)
            if piv is None:
                break
            _, pi, pj = piv
            row_swap(t, pi)
            col_swap(t, pj)
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    row_add(i, t, -(A[i][t] / p if field else A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    col_add(j, t, -(A[t][j] / p if field else A[t][j] // p))
            if any(A[i][t] != 0 for i in range(t + 1, m)) or any(A[t][j] != 0 for j in range(t + 1, n)):
                continue
            if not field:
                bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p != 0), None)
                if bad is not None:
                    row_add(t, bad, 1)
                    continue
            break
        if A[t][t] == 0:
            break
        if field and A[t][t] != 1:
            row_scale(t, 1 / A[t][t])
        elif not field and A[t][t] < 0:
            row_scale(t, -1)

    ring = QQ if field else ZZ
    return SNFDecomposition(
        U=IntMatrix(U, rows=m, cols=m),
        D=IntMatrix(A, rows=m, cols=n),
        V=IntMatrix(V, rows=n, cols=n),
        U_inv=IntMatrix(Ui, rows=m, cols=m),
        V_inv=IntMatrix(Vi, rows=n, cols=n),
        source_shape=(m, n),
        ring=ring,
    )


def smith_normal_form(M: IntMatrix) -> SNFDecomposition:
    """Smith normal form of an integer matrix.

    >>> smith_normal_form(IntMatrix([[2, 4], [6, 8]])).diagonal
    (2, 4)
    """
    if not M.is_integral():
        raise ValueError("smith_normal_form needs integer entries")
    return _diagonalize(M, field=False)


def rank_normal_form(M: IntMatrix) -> SNFDecomposition:
    """The field analogue: ``U @ M @ V`` is ``diag(1, ..., 1, 0, ...)`` over Q."""
    return _diagonalize(M, field=True)


def normal_form(M: IntMatrix, ring: str) -> SNFDecomposition:
    if ring == ZZ:
        return smith_normal_form(M)
    if ring == QQ:
        return rank_normal_form(M)
    raise ValueError(f"unsupported coefficient ring {ring!r}")


def rank(M: IntMatrix) -> int:
    return rank_normal_form(M).rank


def nullspace(M: IntMatrix, ring: str) -> IntMatrix:
    """Columns spanning ``{x : M x = 0}``; over Z a basis of the kernel lattice."""
    nf = normal_form(M, ring)
    return nf.V.submatrix(cols=range(nf.rank, M.cols))


def lattice_basis(G: IntMatrix, ring: str) -> IntMatrix:
    """A basis (as columns) of the lattice or subspace spanned by the columns of ``G``."""
    nf = normal_form(G, ring)
    cols = [[x * nf.diagonal[k] for x in nf.U_inv.col(k)] for k in range(nf.rank)]
    return IntMatrix.from_columns(cols, G.rows)


def solve(A: IntMatrix, b: Sequence[Scalar], ring: str,
          nf: SNFDecomposition | None = None) -> tuple | None:
    """One solution of ``A x = b`` over the ring, or ``None`` if there is none."""
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} rows")
    nf = nf or normal_form(A, ring)
    y = nf.U.apply(b)
    r = nf.rank
    if any(y[i] != 0 for i in range(r, A.rows)):
        return None
    z = []
    for i in range(r):
        d = nf.diagonal[i]
        if ring == ZZ:
            if y[i] % d:
                return None
            z.append(y[i] // d)
        else:
            z.append(Fraction(y[i]) / d)
    z += [0] * (A.cols - r)
    return nf.V.apply(z)


def in_span(A: IntMatrix, b: Sequence[Scalar], ring: str,
            nf: SNFDecomposition | None = None) -> bool:
    return solve(A, b, ring, nf) is not None
