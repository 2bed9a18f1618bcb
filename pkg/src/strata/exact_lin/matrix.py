"""Immutable dense matrices with exact entries.

Entries are Python ``int`` (coefficients in Z) or ``fractions.Fraction``
(coefficients in Q). Nothing in this package ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


class DimensionMismatch(ValueError):
    """Raised when matrix or group shapes are incompatible."""


def _normalize(x) -> Scalar:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _normalize(Fraction(x))
    raise TypeError(f"inexact or unsupported matrix entry: {x!r}")


class IntMatrix:
    """A ``rows x cols`` matrix of exact scalars, stored row-major.

    The 0 x n and n x 0 matrices are valid and carry their shape explicitly.
    Instances are immutable and hashable.

    >>> IntMatrix([[1, 2], [3, 4]]) @ IntMatrix([[1], [1]])
    IntMatrix([[3], [7]])
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable] = (), rows: int | None = None,
                 cols: int | None = None):
        body = tuple(tuple(_normalize(x) for x in row) for row in data)
        nrows = len(body) if rows is None else rows
        if len(body) != nrows:
            raise DimensionMismatch(f"expected {nrows} rows, got {len(body)}")
        if cols is None:
            cols = len(body[0]) if body else 0
        for row in body:
            if len(row) != cols:
                raise DimensionMismatch(f"ragged row of length {len(row)}, expected {cols}")
        if nrows == 0 and cols and rows is None:
            raise DimensionMismatch("cannot infer column count of an empty matrix")
        object.__setattr__(self, "rows", nrows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_data", body)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    # construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], rows=n, cols=n)

    @classmethod
    def diagonal(cls, entries: Sequence[Scalar], rows: int | None = None,
                 cols: int | None = None) -> IntMatrix:
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, x in enumerate(entries):
            data[i][i] = x
        return cls(data, rows=rows, cols=cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], rows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(rows)], rows=rows, cols=len(columns))

    @classmethod
    def column(cls, vec: Sequence[Scalar]) -> IntMatrix:
        return cls([[x] for x in vec], rows=len(vec), cols=1)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> Scalar:
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def tolist(self) -> list[list[Scalar]]:
        return [list(r) for r in self._data]

    def submatrix(self, rows: Sequence[int] | None = None,
                  cols: Sequence[int] | None = None) -> IntMatrix:
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows],
                         rows=len(rows), cols=len(cols))

    # algebra

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self._data],
                         rows=self.rows, cols=other.cols)

    def apply(self, vec: Sequence[Scalar]) -> tuple:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for a {self.shape} matrix")
        return tuple(_normalize(sum(a * b for a, b in zip(r, vec))) for r in self._data)

    def _check_same(self, other: IntMatrix) -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._check_same(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                         rows=self.rows, cols=self.cols)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._check_same(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                         rows=self.rows, cols=self.cols)

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def scale(self, c: Scalar) -> IntMatrix:
        return IntMatrix([[c * a for a in r] for r in self._data], rows=self.rows, cols=self.cols)

    def __pow__(self, k: int) -> IntMatrix:
        if self.rows != self.cols or k < 0:
            raise DimensionMismatch("matrix powers need a square matrix and k >= 0")
        out, base = IntMatrix.identity(self.rows), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> IntMatrix:
        return IntMatrix([self.col(j) for j in range(self.cols)], rows=self.cols, cols=self.rows)

    def hstack(self, *others: IntMatrix) -> IntMatrix:
        mats = (self,) + others
        for m in others:
            if m.rows != self.rows:
                raise DimensionMismatch("hstack needs equal row counts")
        return IntMatrix([sum((m._data[i] for m in mats), ()) for i in range(self.rows)],
                         rows=self.rows, cols=sum(m.cols for m in mats))

    def vstack(self, *others: IntMatrix) -> IntMatrix:
        mats = (self,) + others
        for m in others:
            if m.cols != self.cols:
                raise DimensionMismatch("vstack needs equal column counts")
        return IntMatrix([r for m in mats for r in m._data],
                         rows=sum(m.rows for m in mats), cols=self.cols)

    @staticmethod
    def block_diag(*blocks: IntMatrix) -> IntMatrix:
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        data = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    data[r0 + i][c0 + j] = b._data[i][j]
            r0 += b.rows
            c0 += b.cols
        return IntMatrix(data, rows=rows, cols=cols)

    # predicates

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self._data for x in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})" if self.rows else f"IntMatrix([], rows=0, cols={self.cols})"

    def pretty(self, indent: str = "") -> str:
        """Row-per-line bracketed form, e.g. ``[1 -1]``; rationals as ``p/q``."""
        if self.rows == 0 or self.cols == 0:
            return f"{indent}(empty {self.rows}x{self.cols})"
        cells = [[str(x) for x in r] for r in self._data]
        width = max(len(c) for r in cells for c in r)
        return "\n".join(indent + "[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)
