"""Dense exact rational matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import ShapeMismatch, SingularMatrix

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"``/decimal strings to Fraction.

    Floats are accepted and converted exactly (binary value, no rounding).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, float, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def as_vector(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_rational(x) for x in v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ShapeMismatch(f"dot of length {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), ZERO)


def norm_sq(v: Sequence[Fraction]) -> Fraction:
    return sum((x * x for x in v), ZERO)


def vsub(u, v) -> tuple[Fraction, ...]:
    if len(u) != len(v):
        raise ShapeMismatch(f"subtracting length {len(v)} from {len(u)}")
    return tuple(a - b for a, b in zip(u, v))


def vadd(u, v) -> tuple[Fraction, ...]:
    if len(u) != len(v):
        raise ShapeMismatch(f"adding length {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vscale(c, v) -> tuple[Fraction, ...]:
    return tuple(c * x for x in v)


class RatMatrix:
    """Immutable ``rows x cols`` matrix of Fractions stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(as_rational(x) for x in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ShapeMismatch(
                f"{len(entries)} entries cannot fill a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> RatMatrix:
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeMismatch("ragged rows")
        return cls(len(rows), width, (x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> RatMatrix:
        columns = [as_vector(c) for c in columns]
        if not columns:
            raise ShapeMismatch("need at least one column")
        height = len(columns[0])
        if any(len(c) != height for c in columns):
            raise ShapeMismatch("columns of different lengths")
        return cls(height, len(columns),
                   (columns[j][i] for i in range(height) for j in range(len(columns))))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(n, n, (ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> RatMatrix:
        cols = rows if cols is None else cols
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> RatMatrix:
        n = len(values)
        vals = as_vector(values)
        return cls(n, n, (vals[i] if i == j else ZERO for i in range(n) for j in range(n)))

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RatMatrix([{body}])"

    def is_zero(self) -> bool:
        return not any(self.entries)

    # arithmetic ---------------------------------------------------------

    def _check_same(self, other: RatMatrix, op: str) -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"{op}: {self.shape} vs {other.shape}")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same(other, "add")
        return RatMatrix(self.rows, self.cols,
                         (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._check_same(other, "sub")
        return RatMatrix(self.rows, self.cols,
                         (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> RatMatrix:
        return RatMatrix(self.rows, self.cols, (-a for a in self.entries))

    def scale(self, c) -> RatMatrix:
        c = as_rational(c)
        return RatMatrix(self.rows, self.cols, (c * a for a in self.entries))

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise ShapeMismatch(f"mul: {self.shape} @ {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c)), ZERO))
        return RatMatrix(self.rows, other.cols, out)

    __mul__ = __matmul__

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        v = as_vector(v)
        if len(v) != self.cols:
            raise ShapeMismatch(f"matvec: {self.shape} with vector of length {len(v)}")
        return tuple(dot(self.row(i), v) for i in range(self.rows))

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(self.cols, self.rows,
                         (self.entries[i * self.cols + j]
                          for j in range(self.cols) for i in range(self.rows)))

    def transpose(self) -> RatMatrix:
        return self.T

    def trace(self) -> Fraction:
        if not self.is_square:
            raise ShapeMismatch(f"trace of non-square {self.shape}")
        return sum((self.entries[i * (self.cols + 1)] for i in range(self.rows)), ZERO)

    def frobenius_sq(self) -> Fraction:
        return norm_sq(self.entries)

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        n = self.rows
        return all(self[i, j] == self[j, i] for i in range(n) for j in range(i + 1, n))

    def submatrix_columns(self, idx: Sequence[int]) -> RatMatrix:
        return RatMatrix.from_columns([self.col(j) for j in idx])

    # elimination --------------------------------------------------------

    def rank(self) -> int:
        return _echelon([list(r) for r in self.to_rows()])[0]

    def det(self) -> Fraction:
        if not self.is_square:
            raise ShapeMismatch(f"det of non-square {self.shape}")
        rows = [list(r) for r in self.to_rows()]
        n = self.rows
        sign = 1
        d = ONE
        for c in range(n):
            piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
            if piv is None:
                return ZERO
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                sign = -sign
            p = rows[c][c]
            d *= p
            for r in range(c + 1, n):
                f = rows[r][c]
                if f:
                    f /= p
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
        return d if sign > 0 else -d

    def inverse(self) -> RatMatrix:
        """Exact inverse by Gauss-Jordan elimination over the rationals."""
        if not self.is_square:
            raise ShapeMismatch(f"inverse of non-square {self.shape}")
        n = self.rows
        aug = [list(self.row(i)) + [ONE if i == j else ZERO for j in range(n)]
               for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if piv is None:
                raise SingularMatrix(f"matrix has rank < {n}")
            aug[c], aug[piv] = aug[piv], aug[c]
            p = aug[c][c]
            if p != 1:
                aug[c] = [a / p for a in aug[c]]
            for r in range(n):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
        return RatMatrix(n, n, (x for r in aug for x in r[n:]))

    def solve(self, b: Sequence) -> tuple[Fraction, ...]:
        """Solve ``self @ x = b`` for square nonsingular ``self``."""
        b = as_vector(b)
        if not self.is_square or len(b) != self.rows:
            raise ShapeMismatch(f"solve: {self.shape} with rhs of length {len(b)}")
        n = self.rows
        aug = [list(self.row(i)) + [b[i]] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if piv is None:
                raise SingularMatrix(f"matrix has rank < {n}")
            aug[c], aug[piv] = aug[piv], aug[c]
            p = aug[c][c]
            for r in range(n):
                if r != c and aug[r][c]:
                    f = aug[r][c] / p
                    aug[r] = [a - f * q for a, q in zip(aug[r], aug[c])]
        return tuple(aug[i][n] / aug[i][i] for i in range(n))

    def char_poly(self):
        from .poly import char_poly
        return char_poly(self)


def _echelon(rows: list[list[Fraction]]) -> tuple[int, list[list[Fraction]]]:
    if not rows:
        return 0, rows
    m, n = len(rows), len(rows[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, m):
            f = rows[i][c]
            if f:
                f /= p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return r, rows


def mat_arith(a: RatMatrix, b: RatMatrix | None = None, op: str = "mul"):
    """Dispatch helper: ``op`` is one of add, sub, mul, transpose, trace."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a @ b
    if op == "transpose":
        return a.T
    if op == "trace":
        return a.trace()
    raise ValueError(f"unknown op {op!r}")


def rank(a: RatMatrix) -> int:
    return a.rank()


def mat_inverse(a: RatMatrix) -> RatMatrix:
    return a.inverse()
