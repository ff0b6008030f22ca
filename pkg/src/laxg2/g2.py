"""The 14-dimensional Lie algebra G2 in coordinates (a1, a2, A).

An element is a pair of 3-vectors and a traceless 3x3 matrix.  The 7x7
matrix model

    [[0,        -sqrt2*a2^t, -sqrt2*a1^t],
     [sqrt2*a1,  A,           [a2]      ],
     [sqrt2*a2,  [a1],        -A^t      ]]

is available through :func:`embed` / :func:`project`; the rest of the
package works in coordinates, where every constraint is Q-linear.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import ONE, ZERO, Q, QSqrt2Matrix, fmt, qzeros

DIM = 14

Vec3 = tuple
Mat3 = tuple


class NotInG2(ValueError):
    def __init__(self, block: str, detail: str = ""):
        self.block = block
        super().__init__(f"not in G2: block {block} {detail}".rstrip())


def vec(*xs) -> Vec3:
    if len(xs) == 1 and not isinstance(xs[0], (int, str)) and hasattr(xs[0], "__len__"):
        xs = tuple(xs[0])
    if len(xs) != 3:
        raise ValueError("a Vec3 has exactly three components")
    return tuple(Q(x) for x in xs)


def mat(rows) -> Mat3:
    rows = tuple(tuple(Q(x) for x in row) for row in rows)
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValueError("expected a 3x3 matrix")
    return rows


ZERO3 = (ZERO, ZERO, ZERO)
ZERO33 = (ZERO3, ZERO3, ZERO3)
E3 = ((ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE))


# -- 3x3 helpers -------------------------------------------------------------

def dot(x, y):
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def vadd(x, y):
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2])


def vsub(x, y):
    return (x[0] - y[0], x[1] - y[1], x[2] - y[2])


def vscale(c, x):
    return (c * x[0], c * x[1], c * x[2])


def mvec(a, x):
    return tuple(a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2] for i in range(3))


def transpose(a):
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))


def mmul(a, b):
    return tuple(tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j]
                       for j in range(3)) for i in range(3))


def madd(a, b):
    return tuple(tuple(a[i][j] + b[i][j] for j in range(3)) for i in range(3))


def msub(a, b):
    return tuple(tuple(a[i][j] - b[i][j] for j in range(3)) for i in range(3))


def mscale(c, a):
    return tuple(tuple(c * a[i][j] for j in range(3)) for i in range(3))


def outer(x, y):
    """x y^t"""
    return tuple(tuple(x[i] * y[j] for j in range(3)) for i in range(3))


def trace3(a):
    return a[0][0] + a[1][1] + a[2][2]


def skew(x) -> Mat3:
    """[x], the matrix with [x] y = x cross y."""
    x1, x2, x3 = x
    return ((ZERO, x3, -x2), (-x3, ZERO, x1), (x2, -x1, ZERO))


def cross(x, y) -> Vec3:
    """Vector product in the convention [x] y = x cross y.

    With the sign layout of :func:`skew` this is minus the textbook
    right-handed product: cross(e1, e2) = -e3.
    """
    return (x[2] * y[1] - x[1] * y[2], x[0] * y[2] - x[2] * y[0], x[1] * y[0] - x[0] * y[1])


# -- elements ----------------------------------------------------------------

@dataclass(frozen=True)
class G2Element:
    a1: Vec3
    a2: Vec3
    A: Mat3

    def __post_init__(self):
        object.__setattr__(self, "a1", vec(self.a1))
        object.__setattr__(self, "a2", vec(self.a2))
        object.__setattr__(self, "A", mat(self.A))
        if trace3(self.A) != 0:
            raise NotInG2("(2,2)", f"trace(A) = {fmt(trace3(self.A))} != 0")

    @classmethod
    def zero(cls) -> "G2Element":
        return cls(ZERO3, ZERO3, ZERO33)

    def __add__(self, other: "G2Element") -> "G2Element":
        return G2Element(vadd(self.a1, other.a1), vadd(self.a2, other.a2), madd(self.A, other.A))

    def __sub__(self, other: "G2Element") -> "G2Element":
        return G2Element(vsub(self.a1, other.a1), vsub(self.a2, other.a2), msub(self.A, other.A))

    def __neg__(self) -> "G2Element":
        return self.scale(-1)

    def scale(self, c) -> "G2Element":
        c = Q(c)
        return G2Element(vscale(c, self.a1), vscale(c, self.a2), mscale(c, self.A))

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords())

    def coords(self) -> tuple:
        """Coordinates in :func:`g2_basis` order."""
        A = self.A
        return (self.a1 + self.a2
                + (A[0][0], -A[2][2], A[0][1], A[0][2], A[1][0], A[1][2], A[2][0], A[2][1]))

    @classmethod
    def from_coords(cls, c) -> "G2Element":
        c = [Q(x) for x in c]
        if len(c) != DIM:
            raise ValueError(f"expected {DIM} coordinates, got {len(c)}")
        h1, h2, a01, a02, a10, a12, a20, a21 = c[6:]
        A = ((h1, a01, a02), (a10, h2 - h1, a12), (a20, a21, -h2))
        return cls(tuple(c[0:3]), tuple(c[3:6]), A)

    def to_json(self) -> dict:
        return {"a1": [fmt(x) for x in self.a1], "a2": [fmt(x) for x in self.a2],
                "A": [[fmt(x) for x in row] for row in self.A]}

    @classmethod
    def from_json(cls, d) -> "G2Element":
        return cls(vec(d["a1"]), vec(d["a2"]), mat(d["A"]))

    def __repr__(self):
        return f"G2Element(a1={[fmt(x) for x in self.a1]}, a2={[fmt(x) for x in self.a2]}, A={[[fmt(x) for x in r] for r in self.A]})"


def full_coords(x: G2Element) -> tuple:
    """(a1, a2, all nine entries of A): 15 numbers, handy for linear constraints."""
    return x.a1 + x.a2 + tuple(v for row in x.A for v in row)


def bracket(x: G2Element, y: G2Element) -> G2Element:
    """Closed-form commutator of x = (a1, a2, A) and y = (b1, b2, B)."""
    a1, a2, A = x.a1, x.a2, x.A
    b1, b2, B = y.a1, y.a2, y.A
    At, Bt = transpose(A), transpose(B)
    c1 = vadd(vsub(mvec(A, b1), mvec(B, a1)), vscale(2, cross(a2, b2)))
    c2 = vadd(vadd(vscale(-1, mvec(At, b2)), mvec(Bt, a2)), vscale(2, cross(a1, b1)))
    s = dot(b2, a1) - dot(b1, a2)
    C = msub(mmul(A, B), mmul(B, A))
    C = madd(C, mscale(-3, outer(a1, b2)))
    C = madd(C, mscale(3, outer(b1, a2)))
    C = madd(C, mscale(s, E3))
    return G2Element(c1, c2, C)


def embed(x: G2Element) -> QSqrt2Matrix:
    rat = qzeros(7, 7)
    irr = qzeros(7, 7)
    a1, a2, A = x.a1, x.a2, x.A
    s1, s2 = skew(a1), skew(a2)
    for i in range(3):
        irr[0, 1 + i] = -a2[i]
        irr[0, 4 + i] = -a1[i]
        irr[1 + i, 0] = a1[i]
        irr[4 + i, 0] = a2[i]
        for j in range(3):
            rat[1 + i, 1 + j] = A[i][j]
            rat[1 + i, 4 + j] = s2[i][j]
            rat[4 + i, 1 + j] = s1[i][j]
            rat[4 + i, 4 + j] = -A[j][i]
    return QSqrt2Matrix(rat, irr)


def project(m: QSqrt2Matrix) -> G2Element:
    """Inverse of :func:`embed`; raises NotInG2 naming the first inconsistent block."""
    if m.shape != (7, 7):
        raise NotInG2("shape", f"{m.shape} is not 7x7")
    rat, irr = m.rat, m.irr
    if rat[0, 0] != 0 or irr[0, 0] != 0:
        raise NotInG2("(1,1)", "entry (1,1) must be 0")
    for block, rows, cols in (("(1,2)", [0], range(1, 4)), ("(1,3)", [0], range(4, 7)),
                              ("(2,1)", range(1, 4), [0]), ("(3,1)", range(4, 7), [0])):
        if any(rat[i, j] != 0 for i in rows for j in cols):
            raise NotInG2(block, "must be a sqrt2 multiple of a vector")
    for block, rows, cols in (("(2,2)", range(1, 4), range(1, 4)), ("(2,3)", range(1, 4), range(4, 7)),
                              ("(3,2)", range(4, 7), range(1, 4)), ("(3,3)", range(4, 7), range(4, 7))):
        if any(irr[i, j] != 0 for i in rows for j in cols):
            raise NotInG2(block, "must be rational")
    a1 = tuple(irr[1 + i, 0] for i in range(3))
    a2 = tuple(irr[4 + i, 0] for i in range(3))
    if tuple(-irr[0, 1 + i] for i in range(3)) != a2:
        raise NotInG2("(1,2)", "does not match block (3,1)")
    if tuple(-irr[0, 4 + i] for i in range(3)) != a1:
        raise NotInG2("(1,3)", "does not match block (2,1)")
    A = tuple(tuple(rat[1 + i, 1 + j] for j in range(3)) for i in range(3))
    if tuple(tuple(rat[1 + i, 4 + j] for j in range(3)) for i in range(3)) != skew(a2):
        raise NotInG2("(2,3)", "is not [a2]")
    if tuple(tuple(rat[4 + i, 1 + j] for j in range(3)) for i in range(3)) != skew(a1):
        raise NotInG2("(3,2)", "is not [a1]")
    if tuple(tuple(rat[4 + i, 4 + j] for j in range(3)) for i in range(3)) != mscale(-1, transpose(A)):
        raise NotInG2("(3,3)", "is not -(2,2)^t")
    if trace3(A) != 0:
        raise NotInG2("(2,2)", "is not traceless")
    return G2Element(a1, a2, A)


def trace_form(x: G2Element, y: G2Element):
    """tr(embed(x) embed(y)); always rational."""
    t = (embed(x) @ embed(y)).trace()
    if t.s != 0:
        raise ArithmeticError("sqrt2 part of a G2 trace form survived")
    return t.r


@lru_cache(maxsize=None)
def g2_basis() -> tuple:
    """a1 = e_i (3), a2 = e_i (3), then E11-E22, E22-E33 and the six E_ij, i != j."""
    out = []
    for i in range(DIM):
        c = [0] * DIM
        c[i] = 1
        out.append(G2Element.from_coords(c))
    return tuple(out)


@lru_cache(maxsize=None)
def structure_constants() -> np.ndarray:
    """C[i, j, k]: k-th coordinate of [e_i, e_j]."""
    basis = g2_basis()
    C = qzeros(DIM, DIM, DIM)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            C[i, j, :] = bracket(x, y).coords()
    return C


@lru_cache(maxsize=None)
def gram() -> np.ndarray:
    """K[i, j] = trace_form(e_i, e_j)."""
    basis = g2_basis()
    K = qzeros(DIM, DIM)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            K[i, j] = trace_form(x, y)
    return K


def bracket_coords(u, v) -> np.ndarray:
    """Bracket on coordinate vectors (or stacks of them along the last axis)."""
    C = structure_constants()
    u = np.asarray(u, dtype=object)
    v = np.asarray(v, dtype=object)
    return np.tensordot(np.tensordot(u, C, axes=([-1], [0])), v, axes=([-2], [-1]))


# -- the basic skew-matrix relations and the off-diagonal block identity ----------

def relation_checks(x, y, A) -> dict:
    """The four [x]-relations for vectors x, y and a traceless A."""
    sx, sy = skew(x), skew(y)
    return {
        "skew_times_vector": mvec(sx, y) == cross(x, y),
        "skew_product": mmul(sx, sy) == msub(outer(y, x), mscale(dot(x, y), E3)),
        "skew_conjugation": mscale(-1, skew(mvec(A, x))) == madd(mmul(transpose(A), sx), mmul(sx, A)),
        "skew_of_cross": (skew(cross(x, y)) == msub(mmul(sx, sy), mmul(sy, sx))
                          and skew(cross(x, y)) == msub(outer(y, x), outer(x, y))),
    }


def block_identity(x: G2Element, y: G2Element) -> bool:
    """[A b1 - B a1 + 2 a2 x b2] equals the (3,2) block of the 7x7 commutator."""
    a1, a2, A = x.a1, x.a2, x.A
    b1, b2, B = y.a1, y.a2, y.A
    lhs = skew(vadd(vsub(mvec(A, b1), mvec(B, a1)), vscale(2, cross(a2, b2))))
    rhs = madd(madd(mscale(-2, outer(a2, b2)), mmul(skew(a1), B)),
               madd(mscale(-1, mmul(transpose(A), skew(b1))), mscale(2, outer(b2, a2))))
    rhs = madd(rhs, msub(mmul(transpose(B), skew(a1)), mmul(skew(b1), A)))
    return lhs == rhs


def random_element(rng, bound: int = 5) -> G2Element:
    c = [int(v) for v in rng.integers(-bound, bound + 1, size=DIM)]
    return G2Element.from_coords(c)


def random_vector(rng, bound: int = 5):
    return vec(*[int(v) for v in rng.integers(-bound, bound + 1, size=3)])
