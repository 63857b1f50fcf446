"""Dense exact linear algebra over ℚ, ℚ[i] and ℍ(ℚ).

Matrices are immutable and tagged with the scalar kind of their entries.
Row reduction always acts from the left, so for quaternion matrices ranks and
nullspaces are those of the right module spanned by the columns.

Pivoting is deterministic: columns are scanned left to right and the first
row (top-down) with a nonzero entry becomes the pivot row. Because the
reduced row echelon form is unique, elimination may be split along the
connected blocks of the sparsity pattern without changing any output.
"""
import logging
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from eqbn.scalars import (
    QUATERNION,
    RATIONAL,
    REAL_DIMENSION,
    Scalar,
    conj,
    inverse,
    join_kinds,
    kind_of,
    one,
    promote,
    regular_matrix,
    zero,
)

logger = logging.getLogger(__name__)

Vector = Tuple[Scalar, ...]

# Matrices with at least this many entries are split into connected blocks
# before elimination.
BLOCK_SPLIT_THRESHOLD = 400


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class Matrix:
    """An immutable dense matrix over one scalar kind."""

    __slots__ = ("rows", "cols", "kind", "_data")

    def __init__(
        self,
        data: Sequence[Sequence[Any]],
        kind: Optional[str] = None,
        cols: Optional[int] = None,
    ) -> None:
        raw = [list(row) for row in data]
        if cols is None:
            cols = len(raw[0]) if raw else 0
        for row in raw:
            if len(row) != cols:
                raise DimensionMismatch(
                    f"Ragged matrix: expected rows of length {cols}, got {len(row)}"
                )
        if kind is None:
            kind = join_kinds(kind_of(x) for row in raw for x in row)
        object.__setattr__(self, "rows", len(raw))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(
            self, "_data", tuple(tuple(promote(x, kind) for x in row) for row in raw)
        )

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Matrix is immutable")

    # Construction

    @classmethod
    def identity(cls, n: int, kind: str = RATIONAL) -> "Matrix":
        o, z = one(kind), zero(kind)
        return cls([[o if i == j else z for j in range(n)] for i in range(n)], kind, n)

    @classmethod
    def zeros(cls, rows: int, cols: int, kind: str = RATIONAL) -> "Matrix":
        z = zero(kind)
        return cls([[z] * cols for _ in range(rows)], kind, cols)

    @classmethod
    def from_columns(
        cls,
        columns: Sequence[Sequence[Any]],
        rows: Optional[int] = None,
        kind: Optional[str] = None,
    ) -> "Matrix":
        if rows is None:
            if not columns:
                raise ValueError("Row count required for an empty column list")
            rows = len(columns[0])
        if kind is None:
            kind = join_kinds(kind_of(x) for c in columns for x in c)
        return cls(
            [[columns[j][i] for j in range(len(columns))] for i in range(rows)],
            kind,
            len(columns),
        )

    @classmethod
    def diag(cls, values: Sequence[Any], kind: Optional[str] = None) -> "Matrix":
        if kind is None:
            kind = join_kinds(kind_of(x) for x in values)
        n = len(values)
        z = zero(kind)
        return cls(
            [[values[i] if i == j else z for j in range(n)] for i in range(n)], kind, n
        )

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> Tuple[Scalar, ...]:
        """Row-major entries."""
        return tuple(x for row in self._data for x in row)

    def __getitem__(self, index: Tuple[int, int]) -> Scalar:
        i, j = index
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._data)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> List[List[Scalar]]:
        return [list(row) for row in self._data]

    def is_zero(self) -> bool:
        return not any(x for row in self._data for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self._data)
        return f"Matrix<{self.kind} {self.rows}x{self.cols}>[{body}]"

    # Arithmetic

    def with_kind(self, kind: str) -> "Matrix":
        if kind == self.kind:
            return self
        return Matrix(self._data, join_kinds([kind, self.kind]), self.cols)

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"Shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        kind = join_kinds([self.kind, other.kind])
        return Matrix(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self._data, other._data)],
            kind,
            self.cols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in row] for row in self._data], self.kind, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        kind = join_kinds([self.kind, other.kind])
        z = zero(kind)
        other_cols = other.columns()
        out = []
        for row in self._data:
            support = [(k, x) for k, x in enumerate(row) if x]
            out.append(
                [sum((x * col[k] for k, x in support), z) for col in other_cols]
            )
        return Matrix(out, kind, other.cols)

    def scale(self, s: Any) -> "Matrix":
        """Left scalar multiple s·M."""
        kind = join_kinds([self.kind, kind_of(s)])
        return Matrix([[s * x for x in row] for row in self._data], kind, self.cols)

    def apply(self, vector: Sequence[Any]) -> Vector:
        if len(vector) != self.cols:
            raise DimensionMismatch(
                f"Vector of length {len(vector)} for a matrix with {self.cols} columns"
            )
        kind = join_kinds([self.kind] + [kind_of(x) for x in vector])
        z = zero(kind)
        return tuple(
            sum((x * v for x, v in zip(row, vector) if x and v), z) for row in self._data
        )

    def transpose(self) -> "Matrix":
        return Matrix(
            [[row[j] for row in self._data] for j in range(self.cols)],
            self.kind,
            self.rows,
        )

    def conjugate_transpose(self) -> "Matrix":
        t = self.transpose()
        return Matrix([[conj(x) for x in row] for row in t._data], self.kind, t.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(
            [[self._data[i][j] for j in cols] for i in rows], self.kind, len(cols)
        )

    def real_form(self) -> "Matrix":
        """Real-rational model: each entry becomes its k×k multiplication block."""
        k = REAL_DIMENSION[self.kind]
        out = [[zero(RATIONAL)] * (self.cols * k) for _ in range(self.rows * k)]
        for i, row in enumerate(self._data):
            for j, x in enumerate(row):
                if not x:
                    continue
                block = regular_matrix(x, self.kind)
                for a in range(k):
                    for b in range(k):
                        out[i * k + a][j * k + b] = block[a][b]
        return Matrix(out, RATIONAL, self.cols * k)

    # Inherent invariants

    def det(self) -> Scalar:
        return det(self)

    def inverse(self) -> "Matrix":
        return inverse_matrix(self)


def hstack(*blocks: Matrix) -> Matrix:
    if not blocks:
        raise ValueError("Nothing to stack")
    rows = blocks[0].rows
    for b in blocks:
        if b.rows != rows:
            raise DimensionMismatch("hstack needs equal row counts")
    kind = join_kinds(b.kind for b in blocks)
    return Matrix(
        [[x for b in blocks for x in b.row(i)] for i in range(rows)],
        kind,
        sum(b.cols for b in blocks),
    )


def vstack(*blocks: Matrix) -> Matrix:
    if not blocks:
        raise ValueError("Nothing to stack")
    cols = blocks[0].cols
    for b in blocks:
        if b.cols != cols:
            raise DimensionMismatch("vstack needs equal column counts")
    kind = join_kinds(b.kind for b in blocks)
    return Matrix([row for b in blocks for row in b.to_lists()], kind, cols)


def block_matrix(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    return vstack(*[hstack(*row) for row in blocks])


def _rref_rows(rows: List[List[Scalar]], pivot_cols: int) -> List[int]:
    """Reduce ``rows`` in place to reduced row echelon form; return pivots."""
    pivots: List[int] = []
    n_rows = len(rows)
    r = 0
    for c in range(pivot_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        inv = inverse(rows[r][c])
        rows[r] = [inv * x if x else x for x in rows[r]]
        pivot_row = rows[r]
        for i in range(n_rows):
            f = rows[i][c]
            if i == r or not f:
                continue
            rows[i] = [x - f * y if y else x for x, y in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
    return pivots


def _echelon_rank(rows: List[List[Scalar]]) -> int:
    """Forward elimination only."""
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        inv = inverse(rows[r][c])
        pivot_row = rows[r]
        for i in range(r + 1, n_rows):
            f = rows[i][c]
            if not f:
                continue
            f = f * inv
            rows[i] = [x - f * y if y else x for x, y in zip(rows[i], pivot_row)]
        r += 1
    return r


def connected_blocks(m: Matrix) -> List[Tuple[List[int], List[int]]]:
    """Connected components of the bipartite row/column sparsity graph.

    Returns (row indices, column indices) pairs ordered by their first column
    (rows without any nonzero entry are dropped).
    """
    graph = nx.Graph()
    graph.add_nodes_from(("c", j) for j in range(m.cols))
    for i in range(m.rows):
        for j, x in enumerate(m.row(i)):
            if x:
                graph.add_edge(("r", i), ("c", j))
    blocks = []
    for component in nx.connected_components(graph):
        rows = sorted(idx for tag, idx in component if tag == "r")
        cols = sorted(idx for tag, idx in component if tag == "c")
        blocks.append((rows, cols))
    blocks.sort(key=lambda b: b[1][0])
    return blocks


def _should_split(m: Matrix) -> bool:
    return m.rows * m.cols >= BLOCK_SPLIT_THRESHOLD


# PUBLIC API


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = m.to_lists()
    pivots = _rref_rows(rows, m.cols)
    return Matrix(rows, m.kind, m.cols), pivots


def rank(m: Matrix) -> int:
    """Dimension of the column span over the scalar kind."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if _should_split(m):
        blocks = connected_blocks(m)
        logger.debug("rank: %dx%d split into %d blocks", m.rows, m.cols, len(blocks))
        return sum(
            _echelon_rank(m.submatrix(rows, cols).to_lists())
            for rows, cols in blocks
            if rows
        )
    return _echelon_rank(m.to_lists())


def _nullspace_dense(m: Matrix) -> List[Vector]:
    rows = m.to_lists()
    pivots = _rref_rows(rows, m.cols)
    pivot_set = set(pivots)
    z, o = zero(m.kind), one(m.kind)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        x = [z] * m.cols
        x[free] = o
        for r, p in enumerate(pivots):
            x[p] = -rows[r][free]
        basis.append(tuple(x))
    return basis


def nullspace_basis(m: Matrix) -> List[Vector]:
    """Basis of {x : m·x = 0}, one vector per free column (ascending)."""
    if m.rows == 0 or not _should_split(m):
        return _nullspace_dense(m)
    z = zero(m.kind)
    found = []
    for rows, cols in connected_blocks(m):
        for local in _nullspace_dense(m.submatrix(rows, cols)):
            x = [z] * m.cols
            for j, value in zip(cols, local):
                x[j] = value
            found.append((cols[_free_position(local)], tuple(x)))
    found.sort(key=lambda item: item[0])
    return [x for _, x in found]


def _free_position(local: Vector) -> int:
    # The canonical basis vector of a free column has a 1 there and zeros in
    # every later column, so its last nonzero entry marks the free column.
    return max(k for k, x in enumerate(local) if x)


def left_nullspace_basis(m: Matrix) -> List[Vector]:
    """Basis of {y : m*·y = 0}, a complement of the column span."""
    return nullspace_basis(m.conjugate_transpose())


def column_space_basis(m: Matrix) -> List[Vector]:
    _, pivots = rref(m)
    return [m.column(j) for j in pivots]


def solve(m: Matrix, b: Sequence[Any]) -> Optional[Vector]:
    """Some x with m·x = b, or None when b is outside the column span."""
    if len(b) != m.rows:
        raise DimensionMismatch(f"Right-hand side has length {len(b)}, expected {m.rows}")
    kind = join_kinds([m.kind] + [kind_of(x) for x in b])
    rows = [
        list(row) + [promote(x, kind)]
        for row, x in zip(m.with_kind(kind).to_lists(), b)
    ]
    pivots = _rref_rows(rows, m.cols)
    for r in range(len(pivots), m.rows):
        if rows[r][m.cols]:
            return None
    x = [zero(kind)] * m.cols
    for r, p in enumerate(pivots):
        x[p] = rows[r][m.cols]
    return tuple(x)


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    """Block matrix with blocks a[i][j]·b."""
    kind = join_kinds([a.kind, b.kind])
    out = [[zero(kind)] * (a.cols * b.cols) for _ in range(a.rows * b.rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            x = a[i, j]
            if not x:
                continue
            for k in range(b.rows):
                for t in range(b.cols):
                    y = b[k, t]
                    if y:
                        out[i * b.rows + k][j * b.cols + t] = x * y
    return Matrix(out, kind, a.cols * b.cols)


def det(m: Matrix) -> Scalar:
    """Determinant by fraction-free (Bareiss) elimination."""
    if not m.is_square():
        raise DimensionMismatch("Determinant of a non-square matrix")
    if m.kind == QUATERNION:
        raise ValueError("Determinant is only defined for commutative scalars")
    n = m.rows
    if n == 0:
        return one(m.kind)
    a = m.to_lists()
    sign = 1
    prev = one(m.kind)
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return zero(m.kind)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def inverse_matrix(m: Matrix) -> Matrix:
    if not m.is_square():
        raise DimensionMismatch("Inverse of a non-square matrix")
    n = m.rows
    rows = hstack(m, Matrix.identity(n, m.kind)).to_lists()
    pivots = _rref_rows(rows, n)
    if pivots != list(range(n)):
        raise ValueError("Matrix is singular")
    return Matrix([row[n:] for row in rows], m.kind, n)


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and rank(m) == m.rows


def same_column_span(a: Matrix, b: Matrix) -> bool:
    if a.rows != b.rows:
        raise DimensionMismatch("Column spans live in different spaces")
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(hstack(a, b)) == ra


def column_span_contains(a: Matrix, b: Matrix) -> bool:
    """Whether every column of b lies in the column span of a."""
    return rank(hstack(a, b)) == rank(a)


def vectors_to_matrix(vectors: Sequence[Sequence[Any]], length: int, kind: str) -> Matrix:
    """Columns ``vectors`` as a matrix; an empty list gives a length×0 matrix."""
    if not vectors:
        return Matrix([[] for _ in range(length)], kind, 0)
    return Matrix.from_columns(vectors, length, kind)


def dot(u: Iterable[Any], v: Iterable[Any]) -> Scalar:
    """Bilinear pairing Σ u_i v_i (no conjugation)."""
    total: Any = 0
    for x, y in zip(u, v):
        if x and y:
            total = total + x * y
    return total
