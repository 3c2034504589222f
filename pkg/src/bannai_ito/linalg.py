"""Exact rational scalars and coordinate-keyed sparse matrices.

Scalars are :class:`fractions.Fraction` (always reduced, positive
denominator).  Matrices store only nonzero entries, row by row, and are never
mutated after construction.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]

__all__ = [
    "Rational",
    "SparseRatMatrix",
    "parse_rational",
    "format_rational",
    "kron",
    "bracket",
]


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Floats are refused on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool) or isinstance(text, float):
        raise TypeError(f"refusing inexact value {text!r}; pass 'p/q'")
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if any(c in s for c in ".eE"):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(s)


def format_rational(x: Scalar) -> str:
    return str(Fraction(x))


class SparseRatMatrix:
    """Immutable sparse matrix over the rationals.

    ``rows`` maps a row index to ``{col: value}``; zero values are dropped on
    construction so equality is plain entry comparison.
    """

    __slots__ = ("nrows", "ncols", "_rows", "_hash")

    def __init__(self, nrows: int, ncols: int,
                 rows: Mapping[int, Mapping[int, Scalar]] | None = None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        clean: dict[int, dict[int, Fraction]] = {}
        for i, row in (rows or {}).items():
            if not 0 <= i < self.nrows:
                raise IndexError(f"row {i} out of range for {self.shape}")
            r = {}
            for j, v in row.items():
                if not 0 <= j < self.ncols:
                    raise IndexError(f"col {j} out of range for {self.shape}")
                if v:
                    r[j] = v if isinstance(v, Fraction) else Fraction(v)
            if r:
                clean[i] = r
        self._rows = clean
        self._hash = None

    @classmethod
    def _trusted(cls, nrows: int, ncols: int, rows: dict) -> "SparseRatMatrix":
        # rows already free of zeros and of Fraction values
        m = cls.__new__(cls)
        m.nrows, m.ncols, m._rows, m._hash = nrows, ncols, rows, None
        return m

    # construction helpers

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "SparseRatMatrix":
        return cls._trusted(nrows, nrows if ncols is None else ncols, {})

    @classmethod
    def identity(cls, n: int, scale: Scalar = 1) -> "SparseRatMatrix":
        return cls.diag([scale] * n)

    @classmethod
    def diag(cls, values: Iterable[Scalar]) -> "SparseRatMatrix":
        values = list(values)
        return cls(len(values), len(values), {i: {i: v} for i, v in enumerate(values)})

    @classmethod
    def from_entries(cls, nrows: int, ncols: int,
                     entries: Iterable[tuple[int, int, Scalar]]) -> "SparseRatMatrix":
        rows: dict[int, dict[int, Fraction]] = {}
        for i, j, v in entries:
            r = rows.setdefault(i, {})
            r[j] = r.get(j, 0) + Fraction(v)
        return cls(nrows, ncols, rows)

    @classmethod
    def from_dense(cls, data: Iterable[Iterable[Scalar]]) -> "SparseRatMatrix":
        data = [list(r) for r in data]
        ncols = len(data[0]) if data else 0
        return cls(len(data), ncols,
                   {i: {j: v for j, v in enumerate(r)} for i, r in enumerate(data)})

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows.get(i, {}).get(j, Fraction(0))

    def row(self, i: int) -> Mapping[int, Fraction]:
        return self._rows.get(i, {})

    def items(self) -> Iterator[tuple[int, int, Fraction]]:
        """Nonzero entries sorted by (row, col)."""
        for i in sorted(self._rows):
            r = self._rows[i]
            for j in sorted(r):
                yield i, j, r[j]

    def is_zero(self) -> bool:
        return not self._rows

    def is_diagonal(self) -> bool:
        return all(set(r) <= {i} for i, r in self._rows.items())

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.items():
            out[i][j] = v
        return out

    def to_float(self):
        import numpy as np

        a = np.zeros(self.shape)
        for i, r in self._rows.items():
            for j, v in r.items():
                a[i, j] = float(v)
        return a

    # arithmetic

    def _check_same_shape(self, other: "SparseRatMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "SparseRatMatrix") -> "SparseRatMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseRatMatrix") -> "SparseRatMatrix":
        return self._combine(other, -1)

    def _combine(self, other: "SparseRatMatrix", sign: int) -> "SparseRatMatrix":
        self._check_same_shape(other)
        rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            target = rows.setdefault(i, {})
            for j, v in r.items():
                s = target.get(j, 0) + sign * v
                if s:
                    target[j] = s
                else:
                    target.pop(j, None)
            if not target:
                del rows[i]
        return SparseRatMatrix._trusted(self.nrows, self.ncols, rows)

    def __neg__(self) -> "SparseRatMatrix":
        return self.scale(-1)

    def scale(self, c: Scalar) -> "SparseRatMatrix":
        c = Fraction(c)
        if not c:
            return SparseRatMatrix.zeros(self.nrows, self.ncols)
        rows = {i: {j: c * v for j, v in r.items()} for i, r in self._rows.items()}
        return SparseRatMatrix._trusted(self.nrows, self.ncols, rows)

    def __mul__(self, c: Scalar) -> "SparseRatMatrix":
        if isinstance(c, SparseRatMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseRatMatrix") -> "SparseRatMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        orows = other._rows
        rows = {}
        for i, r in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in r.items():
                ork = orows.get(k)
                if ork is None:
                    continue
                for j, b in ork.items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                rows[i] = acc
        return SparseRatMatrix._trusted(self.nrows, other.ncols, rows)

    def transpose(self) -> "SparseRatMatrix":
        rows: dict[int, dict[int, Fraction]] = {}
        for i, r in self._rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return SparseRatMatrix._trusted(self.ncols, self.nrows, rows)

    @property
    def T(self) -> "SparseRatMatrix":
        return self.transpose()

    def submatrix(self, row_idx: list[int], col_idx: list[int]) -> "SparseRatMatrix":
        cpos = {c: k for k, c in enumerate(col_idx)}
        rows = {}
        for a, i in enumerate(row_idx):
            r = self._rows.get(i)
            if not r:
                continue
            sub = {cpos[j]: v for j, v in r.items() if j in cpos}
            if sub:
                rows[a] = sub
        return SparseRatMatrix._trusted(len(row_idx), len(col_idx), rows)

    def with_entry(self, i: int, j: int, value: Scalar) -> "SparseRatMatrix":
        """Copy with one entry replaced (used for fault injection)."""
        rows = {k: dict(r) for k, r in self._rows.items()}
        rows.setdefault(i, {})[j] = Fraction(value)
        return SparseRatMatrix(self.nrows, self.ncols, rows)

    # comparison / hashing

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseRatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, tuple(self.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparseRatMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    # serialization

    def to_json_obj(self) -> dict:
        return {
            "rows": self.nrows,
            "cols": self.ncols,
            "entries": [[i, j, format_rational(v)] for i, j, v in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "SparseRatMatrix":
        return cls.from_entries(obj["rows"], obj["cols"],
                                ((i, j, parse_rational(v)) for i, j, v in obj["entries"]))

    @classmethod
    def from_json(cls, text: str) -> "SparseRatMatrix":
        return cls.from_json_obj(json.loads(text))


def kron(a: SparseRatMatrix, b: SparseRatMatrix) -> SparseRatMatrix:
    """Kronecker product; entry (i*b.nrows+k, j*b.ncols+l) = a[i,j]*b[k,l]."""
    rows: dict[int, dict[int, Fraction]] = {}
    for i, ra in a._rows.items():
        for k, rb in b._rows.items():
            row = {}
            for j, x in ra.items():
                for l, y in rb.items():
                    row[j * b.ncols + l] = x * y
            rows[i * b.nrows + k] = row
    return SparseRatMatrix._trusted(a.nrows * b.nrows, a.ncols * b.ncols, rows)


def bracket(kind: str, a: SparseRatMatrix, b: SparseRatMatrix) -> SparseRatMatrix:
    """``ab - ba`` for ``"commutator"``, ``ab + ba`` for ``"anticommutator"``."""
    if a.nrows != a.ncols or a.shape != b.shape:
        raise ValueError(f"bracket needs equal square operands, got {a.shape} and {b.shape}")
    if kind == "commutator":
        return a @ b - b @ a
    if kind == "anticommutator":
        return a @ b + b @ a
    raise ValueError(f"unknown bracket kind {kind!r}")
