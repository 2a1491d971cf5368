"""Exact linear algebra over a :class:`~flowforms.field.CoefficientField`.

Matrices are lists of rows of domain elements; vectors are tuples.  Ranks use
fraction-free (Bareiss) elimination, kernels and solves use Gauss-Jordan
reduction.  Everything is small (at most a few dozen rows), so clarity wins
over speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .field import CoefficientField

Vector = tuple
Rows = list


def zero_vector(K: CoefficientField, n: int) -> Vector:
    return tuple(K.zero for _ in range(n))


def unit_vector(K: CoefficientField, n: int, i: int) -> Vector:
    return tuple(K.one if j == i else K.zero for j in range(n))


def bareiss_rank(rows: Sequence[Sequence], K: CoefficientField) -> int:
    """Rank by fraction-free elimination.

    When the entries are polynomials every intermediate stays a polynomial
    because each update is divided exactly by the previous pivot.
    """
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = K.one
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            a = m[i][c]
            for j in range(c + 1, ncols):
                x, y = m[i][j], m[r][j]
                if not a:
                    if x:
                        m[i][j] = (p * x) / prev
                elif x or y:
                    m[i][j] = (p * x - a * y) / prev
            m[i][c] = K.zero
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def rref(rows: Sequence[Sequence], ncols: int, K: CoefficientField) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = K.one / m[r][c]
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int, K: CoefficientField) -> list[Vector]:
    """Basis of {x : A x = 0}, one vector per free column, free entry 1."""
    reduced, pivots = rref(rows, ncols, K)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [K.zero] * ncols
        v[f] = K.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def row_basis(vectors: Iterable[Sequence], n: int, K: CoefficientField) -> list[Vector]:
    """Canonical (RREF) basis of the span of ``vectors`` in K^n."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    reduced, _ = rref(vecs, n, K)
    return [tuple(r) for r in reduced]


def solve(rows: Sequence[Sequence], ncols: int, rhs: Sequence, K: CoefficientField) -> Vector | None:
    """One solution of A x = b (free variables set to zero), or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return zero_vector(K, ncols) if not any(rhs) else None
    reduced, pivots = rref(aug, ncols + 1, K)
    if pivots and pivots[-1] == ncols:
        return None
    x = [K.zero] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return tuple(x)


def columns_to_rows(columns: Sequence[Sequence], n: int) -> list[list]:
    """Matrix (as rows) whose columns are the given vectors of length n."""
    return [[col[i] for col in columns] for i in range(n)]


def in_span(basis: Sequence[Sequence], v: Sequence, K: CoefficientField) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return solve(columns_to_rows(basis, len(v)), len(basis), v, K) is not None


def intersect(U: Sequence[Sequence], V: Sequence[Sequence], n: int, K: CoefficientField) -> list[Vector]:
    """Basis of span(U) ∩ span(V), via the kernel of [U | -V]."""
    if not U or not V:
        return []
    cols = list(U) + [tuple(-x for x in v) for v in V]
    ker = nullspace(columns_to_rows(cols, n), len(cols), K)
    out = []
    for c in ker:
        w = [K.zero] * n
        for coeff, u in zip(c[: len(U)], U):
            if coeff:
                w = [a + coeff * b for a, b in zip(w, u)]
        out.append(w)
    return row_basis(out, n, K)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Exact matrix of a linear map K^ncols -> K^nrows.

    ``rows`` holds the matrix row by row; column j is the image of the j-th
    source basis vector.  ``source`` and ``target`` are free-form labels.
    """

    field: CoefficientField
    rows: tuple
    nrows: int
    ncols: int
    source: str = ""
    target: str = ""
    _rank: list = dc_field(default_factory=list, repr=False, compare=False)

    @classmethod
    def from_rows(cls, K: CoefficientField, rows, nrows: int, ncols: int, source="", target="") -> "LinearMap":
        rows = tuple(tuple(K.convert(x) if not _is_domain_elem(K, x) else x for x in r) for r in rows)
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ValueError(f"matrix shape mismatch: expected {nrows}x{ncols}")
        return cls(K, rows, nrows, ncols, source, target)

    @classmethod
    def from_columns(cls, K: CoefficientField, columns, nrows: int, source="", target="") -> "LinearMap":
        return cls.from_rows(K, columns_to_rows(columns, nrows), nrows, len(columns), source, target)

    @classmethod
    def zero(cls, K: CoefficientField, nrows: int, ncols: int, source="", target="") -> "LinearMap":
        return cls(K, tuple(tuple(K.zero for _ in range(ncols)) for _ in range(nrows)), nrows, ncols, source, target)

    @classmethod
    def identity(cls, K: CoefficientField, n: int, label="") -> "LinearMap":
        return cls(K, tuple(unit_vector(K, n, i) for i in range(n)), n, n, label, label)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for a map with {self.ncols} columns")
        K = self.field
        out = []
        for r in self.rows:
            s = K.zero
            for a, b in zip(r, v):
                if a and b:
                    s += a * b
            out.append(s)
        return tuple(out)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        self.field.check_same(other.field)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        cols = [self.apply(c) for c in other.columns()]
        return LinearMap.from_columns(self.field, cols, self.nrows, other.source, self.target)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        self._check_shape(other)
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return LinearMap(self.field, rows, self.nrows, self.ncols, self.source, self.target)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        self._check_shape(other)
        rows = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return LinearMap(self.field, rows, self.nrows, self.ncols, self.source, self.target)

    def __neg__(self) -> "LinearMap":
        return LinearMap(self.field, tuple(tuple(-a for a in r) for r in self.rows),
                         self.nrows, self.ncols, self.source, self.target)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def _check_shape(self, other: "LinearMap") -> None:
        self.field.check_same(other.field)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def rank(self) -> int:
        if not self._rank:
            self._rank.append(bareiss_rank(self.rows, self.field))
        return self._rank[0]

    def kernel(self) -> list[Vector]:
        return nullspace(self.rows, self.ncols, self.field)

    def image(self) -> list[Vector]:
        """Canonical basis of the column space."""
        return row_basis(self.columns(), self.nrows, self.field)

    def kernel_dim(self) -> int:
        return self.ncols - self.rank()

    def cokernel_dim(self) -> int:
        return self.nrows - self.rank()

    def index(self) -> int:
        return self.kernel_dim() - self.cokernel_dim()

    def power(self, k: int) -> "LinearMap":
        if self.nrows != self.ncols:
            raise ValueError("power of a non-square map")
        out = LinearMap.identity(self.field, self.nrows, self.source)
        for _ in range(k):
            out = self @ out
        return out

    def solve(self, rhs: Sequence) -> Vector | None:
        return solve(self.rows, self.ncols, rhs, self.field)

    def restrict(self, basis: Sequence[Sequence]) -> "LinearMap":
        """The map composed with the inclusion of span(basis)."""
        return LinearMap.from_columns(self.field, [self.apply(b) for b in basis], self.nrows,
                                      self.source, self.target)

    def to_sympy(self):
        import sympy

        return sympy.Matrix(self.nrows, self.ncols,
                            lambda i, j: self.field.to_sympy(self.rows[i][j]))

    def format(self) -> list[list[str]]:
        return [[self.field.format(x) for x in r] for r in self.rows]


def _is_domain_elem(K: CoefficientField, x) -> bool:
    try:
        return K.domain.of_type(x)
    except Exception:
        return False
