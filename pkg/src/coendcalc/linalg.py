"""Exact linear algebra over the rationals.

Dense matrices of `fractions.Fraction` with reduced-row-echelon elimination,
kernels, images, solves, Kronecker products, and the coequalizer/equalizer
constructions everything else computes with.  All bases are canonical
(pivoting on the earliest index), so independent runs agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Shapes of the operands do not line up."""


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


class Matrix:
    """A rows x cols grid of Fractions, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data):
        assert len(data) == rows and all(len(r) == cols for r in data)
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        data = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            data[i][i] = ONE
        return cls(n, n, data)

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        data = [[_frac(x) for x in row] for row in rows]
        if not data:
            return cls(0, 0, [])
        return cls(len(data), len(data[0]), data)

    @classmethod
    def column(cls, entries) -> "Matrix":
        return cls.from_rows([[x] for x in entries])

    @classmethod
    def row(cls, entries) -> "Matrix":
        return cls.from_rows([list(entries)])

    @classmethod
    def hstack(cls, mats) -> "Matrix":
        mats = list(mats)
        rows = mats[0].rows
        assert all(m.rows == rows for m in mats)
        data = [sum((m.data[i] for m in mats), []) for i in range(rows)]
        return cls(rows, sum(m.cols for m in mats), data)

    @classmethod
    def vstack(cls, mats) -> "Matrix":
        mats = list(mats)
        cols = mats[0].cols
        assert all(m.cols == cols for m in mats)
        data = [row[:] for m in mats for row in m.data]
        return cls(sum(m.rows for m in mats), cols, data)

    def copy(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [row[:] for row in self.data])

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("matrix addition shape mismatch")
        return Matrix(
            self.rows,
            self.cols,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("matrix subtraction shape mismatch")
        return Matrix(
            self.rows,
            self.cols,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionError(
                    "matmul shape mismatch: %dx%d * %dx%d"
                    % (self.rows, self.cols, other.rows, other.cols)
                )
            out = [[ZERO] * other.cols for _ in range(self.rows)]
            bdata = other.data
            for i, arow in enumerate(self.data):
                orow = out[i]
                for k, a in enumerate(arow):
                    if a:
                        brow = bdata[k]
                        for j, b in enumerate(brow):
                            if b:
                                orow[j] += a * b
            return Matrix(self.rows, other.cols, out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Matrix":
        c = _frac(c)
        if not c:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix(self.rows, self.cols, [[c * a for a in row] for row in self.data])

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols, self.rows, [list(col) for col in zip(*self.data)]
        ) if self.rows else Matrix(self.cols, 0, [[] for _ in range(self.cols)])

    def col(self, j: int):
        return [row[j] for row in self.data]

    def column_matrix(self, j: int) -> "Matrix":
        return Matrix(self.rows, 1, [[row[j]] for row in self.data])

    def is_zero(self) -> bool:
        return all(not a for row in self.data for a in row)

    def trace(self) -> Fraction:
        assert self.rows == self.cols
        return sum((self.data[i][i] for i in range(self.rows)), ZERO)

    def nnz(self) -> int:
        return sum(1 for row in self.data for a in row if a)

    def rows_slice(self, start: int, stop: int) -> "Matrix":
        return Matrix(stop - start, self.cols, [row[:] for row in self.data[start:stop]])

    def cols_slice(self, start: int, stop: int) -> "Matrix":
        return Matrix(self.rows, stop - start, [row[start:stop] for row in self.data])

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return "Matrix(%r)" % (
                [[str(a) for a in row] for row in self.data],
            )
        return "Matrix(%dx%d)" % (self.rows, self.cols)


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product a (x) b, row-major index convention."""
    out = [[ZERO] * (a.cols * b.cols) for _ in range(a.rows * b.rows)]
    for i, arow in enumerate(a.data):
        for k, av in enumerate(arow):
            if av:
                base_c = k * b.cols
                for j, brow in enumerate(b.data):
                    orow = out[i * b.rows + j]
                    for l, bv in enumerate(brow):
                        if bv:
                            orow[base_c + l] = av * bv
    return Matrix(a.rows * b.rows, a.cols * b.cols, out)


def block_diag(mats) -> Matrix:
    mats = list(mats)
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = [[ZERO] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.data):
            orow = out[r0 + i]
            for j, v in enumerate(row):
                if v:
                    orow[c0 + j] = v
        r0 += m.rows
        c0 += m.cols
    return Matrix(rows, cols, out)


def kron_all(mats) -> Matrix:
    mats = list(mats)
    out = mats[0]
    for m in mats[1:]:
        out = kronecker(out, m)
    return out


def rref(m: Matrix):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    R = [row[:] for row in m.data]
    pivots = []
    r = 0
    for c in range(m.cols):
        pr = None
        for i in range(r, m.rows):
            if R[i][c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            R[r], R[pr] = R[pr], R[r]
        pv = R[r][c]
        if pv != ONE:
            R[r] = [x / pv for x in R[r]]
        rowr = R[r]
        for i in range(len(R)):
            if i != r:
                f = R[i][c]
                if f:
                    Ri = R[i]
                    for j in range(c, m.cols):
                        if rowr[j]:
                            Ri[j] -= f * rowr[j]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return Matrix(m.rows, m.cols, R), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning ker m, canonical (free columns in increasing order)."""
    R, pivots = rref(m)
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    data = [[ZERO] * len(free) for _ in range(m.cols)]
    for a, f in enumerate(free):
        data[f][a] = ONE
        for i, p in enumerate(pivots):
            v = R.data[i][f]
            if v:
                data[p][a] = -v
    return Matrix(m.cols, len(free), data)


def image_basis(m: Matrix) -> Matrix:
    """Columns of m at the pivot positions: a canonical basis of im m."""
    _, pivots = rref(m)
    data = [[row[p] for p in pivots] for row in m.data]
    return Matrix(m.rows, len(pivots), data)


def solve(a: Matrix, rhs: Matrix):
    """Solve a X = rhs exactly.  Returns the particular solution with all
    free variables zero, or None when no solution exists."""
    if a.rows != rhs.rows:
        raise DimensionError("solve shape mismatch")
    aug = Matrix.hstack([a, rhs])
    R, pivots = rref(aug)
    for p in pivots:
        if p >= a.cols:
            return None
    X = [[ZERO] * rhs.cols for _ in range(a.cols)]
    for i, p in enumerate(pivots):
        for j in range(rhs.cols):
            X[p][j] = R.data[i][a.cols + j]
    return Matrix(a.cols, rhs.cols, X)


def inverse(m: Matrix):
    """Exact inverse, or None when singular."""
    if m.rows != m.cols:
        raise DimensionError("inverse of non-square matrix")
    X = solve(m, Matrix.identity(m.rows))
    if X is None or m * X != Matrix.identity(m.rows):
        return None
    return X


class SpanAccumulator:
    """Sparse, incrementally maintained RREF of a growing span of vectors.

    Rows are dicts {column: value} with unit leading entry; full reduction is
    maintained, so the stored rows are the unique RREF of the span regardless
    of insertion order.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows = {}  # pivot column -> sparse row
        self._col_index = {}  # column -> set of pivots whose rows touch it

    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Remainder of vec modulo the current span (sparse dict in/out)."""
        out = dict(vec)
        hits = [p for p in out if p in self.rows]
        for p in hits:
            c = out.get(p)
            if not c:
                continue
            for j, v in self.rows[p].items():
                nv = out.get(j, ZERO) - c * v
                if nv:
                    out[j] = nv
                else:
                    out.pop(j, None)
        return out

    def add(self, vec: dict) -> bool:
        """Insert a vector; True when the rank grew."""
        rem = self.reduce(vec)
        if not rem:
            return False
        p = min(rem)
        c = rem[p]
        newrow = {j: v / c for j, v in rem.items()}
        for q in list(self._col_index.get(p, ())):
            row = self.rows[q]
            f = row.get(p)
            if not f:
                continue
            for j, v in newrow.items():
                nv = row.get(j, ZERO) - f * v
                if nv:
                    row[j] = nv
                    self._col_index.setdefault(j, set()).add(q)
                else:
                    if row.pop(j, None) is not None:
                        s = self._col_index.get(j)
                        if s:
                            s.discard(q)
        for j in newrow:
            self._col_index.setdefault(j, set()).add(p)
        self.rows[p] = newrow
        return True

    def add_matrix_columns(self, m: Matrix):
        for j in range(m.cols):
            vec = {}
            for i in range(m.rows):
                v = m.data[i][j]
                if v:
                    vec[i] = v
            self.add(vec)

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def pivots(self):
        return sorted(self.rows)


@dataclass(frozen=True)
class QuotientSpace:
    """ambient -> quotient data: projection о section = id on the quotient."""

    ambient_dim: int
    projection: Matrix  # quotient_dim x ambient_dim
    section: Matrix  # ambient_dim x quotient_dim

    @property
    def quotient_dim(self) -> int:
        return self.projection.rows


def quotient_by_span(dim: int, acc: SpanAccumulator) -> QuotientSpace:
    """Quotient of k^dim by the accumulated span, canonical RREF basis."""
    pivots = acc.pivots()
    pivset = set(pivots)
    free = [c for c in range(dim) if c not in pivset]
    q = len(free)
    proj = [[ZERO] * dim for _ in range(q)]
    for a, f in enumerate(free):
        proj[a][f] = ONE
    for p in pivots:
        row = acc.rows[p]
        for a, f in enumerate(free):
            v = row.get(f)
            if v:
                proj[a][p] = -v
    sect = [[ZERO] * q for _ in range(dim)]
    for a, f in enumerate(free):
        sect[f][a] = ONE
    return QuotientSpace(dim, Matrix(q, dim, proj), Matrix(dim, q, sect))


def cokernel(m: Matrix) -> QuotientSpace:
    """Quotient of the codomain by im m."""
    acc = SpanAccumulator(m.rows)
    acc.add_matrix_columns(m)
    return quotient_by_span(m.rows, acc)


def coequalizer(s: Matrix, t: Matrix) -> QuotientSpace:
    """Coequalizer of parallel maps s, t: the codomain mod im(s - t)."""
    if (s.rows, s.cols) != (t.rows, t.cols):
        raise DimensionError("coequalizer operands must have identical shapes")
    return cokernel(s - t)


def equalizer(s: Matrix, t: Matrix) -> Matrix:
    """Inclusion of ker(s - t), the equalizer of two parallel maps."""
    if (s.rows, s.cols) != (t.rows, t.cols):
        raise DimensionError("equalizer operands must have identical shapes")
    return kernel_basis(s - t)


def factor_through_quotient(q: QuotientSpace, target_map: Matrix):
    """Unique m with m о projection = target_map, or None when target_map
    does not kill the quotiented span."""
    X = solve(q.projection.transpose(), target_map.transpose())
    if X is None:
        return None
    m = X.transpose()
    if m * q.projection != target_map:
        return None
    return m


def scalar_to_str(x: Fraction) -> str:
    return str(x)


def scalar_from_str(s: str) -> Fraction:
    return Fraction(s)


def matrix_to_strings(m: Matrix):
    return [[str(a) for a in row] for row in m.data]


def matrix_from_strings(rows) -> Matrix:
    return Matrix.from_rows([[Fraction(x) for x in row] for row in rows])
