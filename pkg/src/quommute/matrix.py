"""Sparse exact matrices over Fractions or Scalars."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class Matrix:
    """Sparse matrix; entries are Fractions or Scalars, zeros never stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        self.rows, self.cols = rows, cols
        self.entries: dict[tuple[int, int], object] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                if v:
                    self.entries[(i, j)] = v

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> Matrix:
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, n: int, one=Fraction(1)) -> Matrix:
        return cls(n, n, {(i, i): one for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Iterable[Iterable]) -> Matrix:
        rows = [list(r) for r in rows]
        nc = len(rows[0]) if rows else 0
        return cls(len(rows), nc, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        return self.entries.get(ij, 0)

    def _check(self, other: Matrix):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        m = Matrix(self.rows, self.cols)
        m.entries = out
        return m

    def __neg__(self) -> Matrix:
        m = Matrix(self.rows, self.cols)
        m.entries = {k: -v for k, v in self.entries.items()}
        return m

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c) -> Matrix:
        m = Matrix(self.rows, self.cols)
        if c:
            m.entries = {k: v * c for k, v in self.entries.items() if v * c}
        return m

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], object] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                s = out[key] + a * b if key in out else a * b
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        m = Matrix(self.rows, other.cols)
        m.entries = out
        return m

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __pow__(self, k: int) -> Matrix:
        if k < 0:
            raise ValueError("negative matrix power")
        out = Matrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def __bool__(self) -> bool:
        return bool(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and not (self - other).entries

    __hash__ = None

    def map(self, fn) -> Matrix:
        m = Matrix(self.rows, self.cols)
        for k, v in self.entries.items():
            w = fn(v)
            if w:
                m.entries[k] = w
        return m

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> Matrix:
        rows, cols = list(rows), list(cols)
        ri = {r: i for i, r in enumerate(rows)}
        ci = {c: j for j, c in enumerate(cols)}
        return Matrix(
            len(rows), len(cols),
            {(ri[i], ci[j]): v for (i, j), v in self.entries.items() if i in ri and j in ci},
        )

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, str(v)] for (i, j), v in sorted(self.entries.items())],
        }

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


def rank(m: Matrix) -> int:
    """Rank by Gaussian elimination over the coefficient field."""
    rows = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    rows = [r for r in rows if r]
    rk = 0
    for col in range(m.cols):
        piv = next((r for r in rows if r.get(col)), None)
        if piv is None:
            continue
        rows.remove(piv)
        pv = piv[col]
        new = []
        for r in rows:
            c = r.get(col)
            if c:
                f = c / pv
                for j, v in piv.items():
                    s = r.get(j, 0) - f * v
                    if s:
                        r[j] = s
                    else:
                        r.pop(j, None)
            if r:
                new.append(r)
        rows = new
        rk += 1
    return rk


def charpoly(m: Matrix) -> list:
    """Characteristic polynomial coefficients, lowest degree first (Faddeev-LeVerrier)."""
    n = m.rows
    if m.rows != m.cols:
        raise ValueError("characteristic polynomial needs a square matrix")
    coeffs = [0] * (n + 1)
    coeffs[n] = Fraction(1)
    M = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for k in range(1, n + 1):
        M = m @ M + ident.scale(coeffs[n - k + 1])
        AM = m @ M
        tr = sum((AM[i, i] for i in range(n)), Fraction(0))
        coeffs[n - k] = tr * Fraction(-1, k)
    return coeffs
