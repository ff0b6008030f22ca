"""Exact scalars (Q and Q(sqrt 2)) and small dense exact linear algebra.

Rationals are ``gmpy2.mpq`` values: arbitrary-size numerator, positive
denominator, always in lowest terms.  Matrices are numpy object arrays of
``mpq``.  Nothing in here ever rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral

import numpy as np
from gmpy2 import mpq

Rational = mpq

ZERO = mpq(0)
ONE = mpq(1)


class Inconsistent(ArithmeticError):
    """The right-hand side is not in the column space."""


def Q(x) -> mpq:
    """Coerce ints, Fractions, mpq and "p/q" strings to an exact rational.

    Floats are rejected on purpose.
    """
    if isinstance(x, float):
        raise TypeError(f"refusing to build an exact rational from float {x!r}")
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational string")
        try:
            return mpq(s)
        except ValueError as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (Integral, type(ZERO))) or hasattr(x, "numerator"):
        return mpq(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


def fmt(q) -> str:
    """'p/q', or 'p' when the denominator is 1."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def qarray(data) -> np.ndarray:
    """Object array of mpq with the shape of ``data``."""
    arr = np.array(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Q(v)
    return out


def qzeros(*shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def qeye(n: int) -> np.ndarray:
    out = qzeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def is_zero(arr) -> bool:
    return all(v == 0 for v in np.asarray(arr, dtype=object).flat)


class QSqrt2:
    """Element r + s*sqrt(2) of Q(sqrt 2)."""

    __slots__ = ("r", "s")

    def __init__(self, r=0, s=0):
        self.r = Q(r)
        self.s = Q(s)

    @staticmethod
    def _lift(x) -> "QSqrt2":
        return x if isinstance(x, QSqrt2) else QSqrt2(x, 0)

    def __add__(self, other):
        o = self._lift(other)
        return QSqrt2(self.r + o.r, self.s + o.s)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return QSqrt2(self.r - o.r, self.s - o.s)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return QSqrt2(-self.r, -self.s)

    def __mul__(self, other):
        o = self._lift(other)
        return QSqrt2(self.r * o.r + 2 * self.s * o.s, self.r * o.s + self.s * o.r)

    __rmul__ = __mul__

    def conj(self) -> "QSqrt2":
        return QSqrt2(self.r, -self.s)

    def norm(self) -> mpq:
        return self.r * self.r - 2 * self.s * self.s

    def inverse(self) -> "QSqrt2":
        n = self.norm()
        if n == 0:
            # sqrt 2 is irrational, so the norm vanishes only at zero
            raise ZeroDivisionError("QSqrt2 division by zero")
        return QSqrt2(self.r / n, -self.s / n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.r == o.r and self.s == o.s

    def __hash__(self):
        return hash((self.r, self.s))

    def __bool__(self):
        return bool(self.r) or bool(self.s)

    def __repr__(self):
        return f"QSqrt2({fmt(self.r)}, {fmt(self.s)})"


SQRT2 = QSqrt2(0, 1)


class QSqrt2Matrix:
    """Matrix over Q(sqrt 2) stored as the pair ``rat + sqrt2 * irr``."""

    __slots__ = ("rat", "irr")

    def __init__(self, rat, irr=None):
        self.rat = rat if isinstance(rat, np.ndarray) and rat.dtype == object else qarray(rat)
        if irr is None:
            irr = qzeros(*self.rat.shape)
        self.irr = irr if isinstance(irr, np.ndarray) and irr.dtype == object else qarray(irr)
        if self.rat.shape != self.irr.shape:
            raise ValueError("rational and sqrt2 parts differ in shape")

    @classmethod
    def zeros(cls, n, m=None):
        m = n if m is None else m
        return cls(qzeros(n, m), qzeros(n, m))

    @classmethod
    def from_entries(cls, rows) -> "QSqrt2Matrix":
        rows = [[QSqrt2._lift(v) for v in row] for row in rows]
        return cls([[v.r for v in row] for row in rows], [[v.s for v in row] for row in rows])

    @property
    def shape(self):
        return self.rat.shape

    def __getitem__(self, ij) -> QSqrt2:
        return QSqrt2(self.rat[ij], self.irr[ij])

    def __add__(self, other):
        return QSqrt2Matrix(self.rat + other.rat, self.irr + other.irr)

    def __sub__(self, other):
        return QSqrt2Matrix(self.rat - other.rat, self.irr - other.irr)

    def __neg__(self):
        return QSqrt2Matrix(-self.rat, -self.irr)

    def scale(self, c) -> "QSqrt2Matrix":
        c = Q(c)
        return QSqrt2Matrix(self.rat * c, self.irr * c)

    def __matmul__(self, other):
        r = self.rat.dot(other.rat) + 2 * self.irr.dot(other.irr)
        s = self.rat.dot(other.irr) + self.irr.dot(other.rat)
        return QSqrt2Matrix(r, s)

    def trace(self) -> QSqrt2:
        n = min(self.shape)
        return QSqrt2(sum(self.rat[i, i] for i in range(n)), sum(self.irr[i, i] for i in range(n)))

    def is_zero(self) -> bool:
        return is_zero(self.rat) and is_zero(self.irr)

    def __eq__(self, other):
        if not isinstance(other, QSqrt2Matrix):
            return NotImplemented
        return (self.shape == other.shape and bool(np.all(self.rat == other.rat))
                and bool(np.all(self.irr == other.irr)))

    __hash__ = None

    def __repr__(self):
        return f"QSqrt2Matrix(shape={self.shape})"


# -- elimination -------------------------------------------------------------

def _rows(m) -> tuple[list[list[mpq]], int]:
    arr = np.asarray(m, dtype=object)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    return [[Q(v) for v in row] for row in arr], arr.shape[1]


def rref(m, ncols: int | None = None) -> tuple[list[list[mpq]], list[int]]:
    """Reduced row echelon form by exact Gauss-Jordan elimination.

    Returns all rows (pivot rows first, in pivot order) and the pivot
    columns.  Only the first ``ncols`` columns are eligible as pivots, so an
    augmented system keeps its inconsistent rows below the pivots.
    """
    rows, width = _rows(m)
    ncols = width if ncols is None else ncols
    nrows = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = 1 / prow[c]
        nz = [j for j in range(c, width) if prow[j]]
        for j in nz:
            prow[j] *= inv
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(m) -> int:
    arr = np.asarray(m, dtype=object)
    if arr.size == 0:
        return 0
    return len(rref(arr)[1])


def _kernel_from_rref(rows, pivots, ncols) -> list[np.ndarray]:
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = qzeros(ncols)
        v[f] = ONE
        for row, pc in zip(rows, pivots):
            if row[f]:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def kernel_basis(m) -> list[np.ndarray]:
    """Basis of {v : m v = 0}; exactly cols - rank vectors."""
    arr = np.asarray(m, dtype=object)
    ncols = arr.shape[1]
    if arr.shape[0] == 0:
        rows, pivots = [], []
    else:
        rows, pivots = rref(arr)
    return _kernel_from_rref(rows, pivots, ncols)


@dataclass(frozen=True)
class LinearSystem:
    coefficient_matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coefficient_matrix, dtype=object)
        b = np.asarray(self.rhs, dtype=object).reshape(-1)
        if a.ndim != 2 or a.shape[0] != b.shape[0]:
            raise ValueError(f"shape mismatch: matrix {a.shape}, rhs {b.shape}")
        object.__setattr__(self, "coefficient_matrix", a)
        object.__setattr__(self, "rhs", b)

    def residual(self, x) -> np.ndarray:
        return self.coefficient_matrix.dot(np.asarray(x, dtype=object)) - self.rhs


@dataclass(frozen=True)
class AffineSolution:
    particular: np.ndarray
    kernel: list


def solve_affine(system: LinearSystem) -> AffineSolution:
    """All solutions of A x = b as particular + span(kernel).

    Raises Inconsistent when b is outside the column space.
    """
    a, b = system.coefficient_matrix, system.rhs
    nrows, ncols = a.shape
    aug = np.empty((nrows, ncols + 1), dtype=object)
    if nrows:
        aug[:, :ncols] = a
        aug[:, ncols] = b
        rows, pivots = rref(aug, ncols=ncols)
    else:
        rows, pivots = [], []
    for row in rows[len(pivots):]:
        if row[ncols]:
            raise Inconsistent("rhs is not in the column space")
    x = qzeros(ncols)
    for row, pc in zip(rows, pivots):
        x[pc] = row[ncols]
    kernel = _kernel_from_rref([row[:ncols] for row in rows], pivots, ncols)
    return AffineSolution(x, kernel)


def solve_many(a, b) -> np.ndarray:
    """Exact X with a X = b for a full-column-rank ``a``; raises Inconsistent.

    ``b`` is (rows, k); the result is (cols, k).
    """
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    nrows, ncols = a.shape
    k = b.shape[1]
    aug = np.empty((nrows, ncols + k), dtype=object)
    aug[:, :ncols] = a
    aug[:, ncols:] = b
    rows, pivots = rref(aug, ncols=ncols)
    if len(pivots) != ncols:
        raise ValueError("coefficient matrix does not have full column rank")
    if any(any(v for v in row[ncols:]) for row in rows[ncols:]):
        raise Inconsistent("some right-hand side is not in the column space")
    x = qzeros(ncols, k)
    for row, pc in zip(rows, pivots):
        x[pc, :] = row[ncols:]
    return x


def matrix_of(f, n_in: int) -> np.ndarray:
    """Matrix of a linear map given as a function on length-``n_in`` vectors."""
    cols = []
    for j in range(n_in):
        e = qzeros(n_in)
        e[j] = ONE
        cols.append([Q(v) for v in f(e)])
    if not cols:
        return qzeros(0, 0)
    return qarray(cols).T.copy()


def affine_system(f, n_in: int) -> LinearSystem:
    """LinearSystem A x = b for the affine residual map x -> f(x), solved by f(x) = 0."""
    base = np.array([Q(v) for v in f(qzeros(n_in))], dtype=object)
    cols = []
    for j in range(n_in):
        e = qzeros(n_in)
        e[j] = ONE
        cols.append(np.array([Q(v) for v in f(e)], dtype=object) - base)
    a = np.array(cols, dtype=object).T.copy() if cols else qzeros(len(base), 0)
    return LinearSystem(a, -base)


def independent_subset(vectors) -> list[int]:
    """Indices of a maximal linearly independent subfamily (greedy, in order)."""
    if not vectors:
        return []
    arr = np.array([list(v) for v in vectors], dtype=object).T
    return rref(arr)[1]


def primitive(v) -> np.ndarray:
    """Scale a rational vector to coprime integers with a positive leading entry."""
    v = np.asarray(v, dtype=object)
    from math import gcd, lcm
    den = 1
    for x in v.flat:
        den = lcm(den, int(Q(x).denominator))
    ints = [int(Q(x) * den) for x in v.flat]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return qarray(v)
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return qarray([x // g for x in ints]).reshape(v.shape)
