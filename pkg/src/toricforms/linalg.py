"""Dense exact linear algebra over Q or Q(zeta_l).

Rational matrices go through a fraction-free integer echelon engine
(:class:`Echelon`); cyclotomic matrices use plain Gauss-Jordan elimination.
Both produce the unique reduced row echelon form, with the first nonzero
entry in column order as pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .field import CycNum

QQ = "QQ"


def field_of(x) -> object:
    """Field tag of a scalar: 'QQ' or the cyclotomic level."""
    if isinstance(x, CycNum):
        return x.level
    return QQ


def field_zero(tag):
    return Fraction(0) if tag == QQ else CycNum.zero(tag)


def field_one(tag):
    return Fraction(1) if tag == QQ else CycNum.one(tag)


def _coerce(x, tag):
    if tag == QQ:
        if isinstance(x, CycNum):
            if not x.is_rational():
                raise ValueError("non-rational entry in a QQ matrix")
            return x.coords[0]
        return Fraction(x)
    if isinstance(x, CycNum):
        if x.level != tag:
            raise ValueError("field tag mismatch")
        return x
    return CycNum(tag, [x])


class Mat:
    """Row-major matrix with entries in one field (Fractions or CycNums)."""

    __slots__ = ("rows", "cols", "data", "field")

    def __init__(self, data: Sequence[Sequence], cols: int | None = None, field=None):
        data = [list(r) for r in data]
        if cols is None:
            cols = len(data[0]) if data else 0
        if field is None:
            field = QQ
            for r in data:
                for x in r:
                    if isinstance(x, CycNum):
                        field = x.level
                        break
                if field != QQ:
                    break
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.data = [[_coerce(x, field) for x in r] for r in data]
        self.rows = len(data)
        self.cols = cols
        self.field = field

    @classmethod
    def zeros(cls, rows: int, cols: int, field=QQ) -> Mat:
        z = field_zero(field)
        return cls([[z] * cols for _ in range(rows)], cols, field)

    @classmethod
    def identity(cls, n: int, field=QQ) -> Mat:
        z, o = field_zero(field), field_one(field)
        return cls([[o if i == j else z for j in range(n)] for i in range(n)], n, field)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, field={self.field})"

    def transpose(self) -> Mat:
        return Mat([list(c) for c in zip(*self.data)] if self.rows else [], self.rows, self.field)

    @property
    def T(self) -> Mat:
        return self.transpose()

    def __add__(self, other: Mat) -> Mat:
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols, self.field)

    def __sub__(self, other: Mat) -> Mat:
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols, self.field)

    def scale(self, c) -> Mat:
        return Mat([[c * a for a in r] for r in self.data], self.cols, self.field)

    def __matmul__(self, other: Mat) -> Mat:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        zero = field_zero(self.field)
        cols_other = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for col in cols_other:
                s = zero
                for k, a in nz:
                    b = col[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Mat(out, other.cols, self.field)

    def apply(self, v: Sequence) -> list:
        """Matrix times column vector."""
        zero = field_zero(self.field)
        out = []
        for r in self.data:
            s = zero
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    def to_json(self) -> dict:
        from .field import rational_to_str

        if self.field == QQ:
            entries = [[rational_to_str(x) for x in r] for r in self.data]
        else:
            entries = [[x.to_json()["coords"] for x in r] for r in self.data]
        return {"rows": self.rows, "cols": self.cols, "field": self.field, "entries": entries}

    @classmethod
    def from_json(cls, d: dict) -> Mat:
        field = d["field"]
        if field == QQ:
            data = [[Fraction(x) for x in r] for r in d["entries"]]
        else:
            data = [[CycNum(field, [Fraction(c) for c in x]) for x in r] for r in d["entries"]]
        return cls(data, d["cols"], field)


# ---------------------------------------------------------------------------
# fraction-free integer echelon


def _primitive(v: np.ndarray) -> np.ndarray:
    g = math.gcd(*v.tolist()) if len(v) else 0
    if g > 1:
        v = v // g
    return v


def _first_nonzero(v: np.ndarray) -> int:
    nz = np.flatnonzero(v)
    return int(nz[0]) if len(nz) else -1


def to_int_row(v: Sequence) -> tuple[np.ndarray, int]:
    """Clear denominators of a rational vector: returns (integer numerators, common denominator)."""
    den = 1
    for x in v:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    arr = np.empty(len(v), dtype=object)
    for i, x in enumerate(v):
        arr[i] = int(x * den) if den != 1 or isinstance(x, Fraction) else int(x)
    return arr, den


class Echelon:
    """Incrementally maintained reduced row echelon basis of a rational row space.

    Rows are stored as primitive integer vectors with positive pivot; every
    pivot column is zero in all other rows.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, np.ndarray] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def copy(self) -> Echelon:
        e = Echelon(self.ncols)
        e.rows = dict(self.rows)
        return e

    def _reduce_int(self, v: np.ndarray) -> tuple[np.ndarray, int]:
        """Reduce an integer vector; returns (numerator, multiplier) with result = num / mult."""
        mult = 1
        for p, row in self.rows.items():
            c = v[p]
            if c:
                pv = row[p]
                g = math.gcd(c, pv)
                v = (pv // g) * v - (c // g) * row
                mult *= pv // g
        if mult > 1 or len(v):
            g = math.gcd(mult, *v.tolist()) if len(v) else mult
            if g > 1:
                v = v // g
                mult //= g
        return v, mult

    def reduce(self, v: Sequence) -> list[Fraction]:
        """Canonical residual of v modulo the row space (zero at pivot columns)."""
        arr, den = to_int_row(v)
        r, mult = self._reduce_int(arr)
        d = den * mult
        return [Fraction(int(x), d) for x in r]

    def reduce_int(self, arr: np.ndarray) -> tuple[np.ndarray, int]:
        return self._reduce_int(np.asarray(arr, dtype=object))

    def contains(self, v: Sequence) -> bool:
        arr, _ = to_int_row(v)
        r, _ = self._reduce_int(arr)
        return not r.any()

    def add_int(self, arr: np.ndarray) -> bool:
        r, _ = self._reduce_int(np.asarray(arr, dtype=object))
        p = _first_nonzero(r)
        if p < 0:
            return False
        r = _primitive(r)
        if r[p] < 0:
            r = -r
        for q, row in list(self.rows.items()):
            c = row[p]
            if c:
                g = math.gcd(c, r[p])
                self.rows[q] = _primitive((r[p] // g) * row - (c // g) * r)
        self.rows[p] = r
        return True

    def add(self, v: Sequence) -> bool:
        arr, _ = to_int_row(v)
        return self.add_int(arr)

    def basis(self) -> list[list[Fraction]]:
        """Reduced rows with pivot 1, ordered by pivot."""
        out = []
        for p in self.pivots:
            row = self.rows[p]
            pv = row[p]
            out.append([Fraction(int(x), int(pv)) for x in row])
        return out


# ---------------------------------------------------------------------------
# rref / kernel / subspaces


def _rref_generic(data: list[list], field) -> tuple[list[list], list[int]]:
    a = [list(r) for r in data]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        i = next((i for i in range(r, nrows) if a[i][c]), None)
        if i is None:
            continue
        a[r], a[i] = a[i], a[r]
        inv = field_one(field) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for k in range(nrows):
            if k != r and a[k][c]:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: Mat) -> tuple[Mat, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    if m.field == QQ:
        ech = Echelon(m.cols)
        for row in m.data:
            ech.add(row)
        rows = ech.basis()
        pivots = ech.pivots
        z = Fraction(0)
        rows += [[z] * m.cols for _ in range(m.rows - len(rows))]
        return Mat(rows, m.cols, QQ), pivots, len(pivots)
    a, pivots = _rref_generic(m.data, m.field)
    return Mat(a, m.cols, m.field), pivots, len(pivots)


def rank(m: Mat) -> int:
    return rref(m)[2]


@dataclass(frozen=True)
class Subspace:
    """Subspace of field^ambient given by its canonical (reduced echelon) basis."""

    ambient: int
    basis: tuple[tuple, ...]
    field: object = QQ

    @classmethod
    def span(cls, vectors: Sequence[Sequence], ambient: int, field=QQ) -> Subspace:
        if not vectors:
            return cls(ambient, (), field)
        red, _, rk = rref(Mat(vectors, ambient, field))
        return cls(ambient, tuple(tuple(r) for r in red.data[:rk]), field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(r) if x) for r in self.basis]

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient:
            raise ValueError("ambient mismatch")
        v = [_coerce(x, self.field) for x in v]
        for r, p in zip(self.basis, self.pivots()):
            c = v[p]
            if c:
                v = [x - c * y for x, y in zip(v, r)]
        return not any(v)

    def coordinates(self, v: Sequence) -> list:
        """Coordinates of v in the echelon basis (raises if v is not in the subspace)."""
        coords = [v[p] for p in self.pivots()]
        zero = field_zero(self.field)
        recon = [zero] * self.ambient
        for c, r in zip(coords, self.basis):
            if c:
                recon = [x + c * y for x, y in zip(recon, r)]
        if [_coerce(x, self.field) for x in v] != recon:
            raise ValueError("vector not in subspace")
        return coords

    def __add__(self, other: Subspace) -> Subspace:
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        return Subspace.span(list(self.basis) + list(other.basis), self.ambient, self.field)

    def intersect(self, other: Subspace) -> Subspace:
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.ambient, (), self.field)
        # v in other  <=>  v . w = 0 for every w in the null space of other's basis
        ann = kernel_basis(Mat(other.basis, self.ambient, self.field))
        if ann.dim == 0:
            return self
        a = Mat(self.basis, self.ambient, self.field)
        prod = a @ Mat(ann.basis, self.ambient, self.field).T  # dim(self) x dim(ann)
        alphas = kernel_basis(prod.T)  # alpha with alpha . rows(prod) = 0
        vecs = []
        zero = field_zero(self.field)
        for alpha in alphas.basis:
            v = [zero] * self.ambient
            for c, r in zip(alpha, self.basis):
                if c:
                    v = [x + c * y for x, y in zip(v, r)]
            vecs.append(v)
        return Subspace.span(vecs, self.ambient, self.field)


def kernel_basis(m: Mat) -> Subspace:
    """Right null space {x : m x = 0}."""
    red, pivots, rk = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    zero, one = field_zero(m.field), field_one(m.field)
    vecs = []
    for f in free:
        v = [zero] * m.cols
        v[f] = one
        for row, p in zip(red.data[:rk], pivots):
            v[p] = -row[f]
        vecs.append(v)
    return Subspace.span(vecs, m.cols, m.field)


def span_ops(a: Subspace, b: Subspace, vector: Sequence | None = None) -> dict:
    """Dimensions of a, b, a+b, a&b and (optionally) membership of a vector in each."""
    if a.ambient != b.ambient:
        raise ValueError("ambient mismatch")
    s = a + b
    i = a.intersect(b)
    out = {"dim_a": a.dim, "dim_b": b.dim, "dim_sum": s.dim, "dim_intersection": i.dim}
    if vector is not None:
        out["in_a"] = a.contains(vector)
        out["in_b"] = b.contains(vector)
        out["in_sum"] = s.contains(vector)
        out["in_intersection"] = i.contains(vector)
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial


def charpoly(m: Mat) -> list:
    """Monic characteristic polynomial det(x I - m), coefficients lowest degree first.

    Berkowitz's algorithm: no divisions, so it runs unchanged over any commutative ring.
    """
    if m.rows != m.cols:
        raise ValueError("charpoly of a non-square matrix")
    n = m.rows
    one, zero = field_one(m.field), field_zero(m.field)
    if n == 0:
        return [one]
    a = m.data
    vect = [one, -a[0][0]]  # highest degree first
    for k in range(1, n):
        row = a[k][:k]
        col = [a[i][k] for i in range(k)]
        sub = [r[:k] for r in a[:k]]
        t = [one, -a[k][k]]
        cur = col
        for _ in range(k):
            t.append(-sum((x * y for x, y in zip(row, cur)), zero))
            cur = [sum((x * y for x, y in zip(r, cur)), zero) for r in sub]
        new = []
        for i in range(k + 2):
            s = zero
            for j in range(max(0, i - len(t) + 1), min(i, k) + 1):
                s = s + t[i - j] * vect[j]
            new.append(s)
        vect = new
    return vect[::-1]


def poly_eval_matrix(coeffs: Sequence, m: Mat) -> Mat:
    """Evaluate a polynomial (lowest degree first) at a square matrix by Horner's rule."""
    n = m.rows
    acc = Mat.zeros(n, n, m.field)
    ident = Mat.identity(n, m.field)
    for c in reversed(coeffs):
        acc = acc @ m + ident.scale(c)
    return acc
