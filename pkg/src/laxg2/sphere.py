"""Genus-0 realisation: G2-valued rational functions on the Riemann sphere.

An element of degree m is numerator(z) / den(z) with a matrix polynomial
numerator (rows are g2 coordinate vectors, lowest power first) and den a
product of (z - c)^e over finite marked points.  All pole and zero
conditions of the divisor D_m turn into linear conditions on numerator
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, floor, lcm

import numpy as np

from .exact import ONE, ZERO, Inconsistent, Q, fmt, kernel_basis, qarray, qzeros, rank, solve_many
from .g2 import DIM, G2Element, structure_constants
from .jets import MatrixJet
from .tyurin import TyurinDatum, annihilator, DegenerateDatum

INF = "inf"


class InvalidGrading(ValueError):
    pass


class DegenerateConfiguration(ValueError):
    pass


class NotInWindow(ValueError):
    pass


def _point(p):
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return Q(p)


def _fmt_point(p) -> str:
    return INF if p == INF else fmt(p)


@dataclass(frozen=True)
class SurfaceSpec:
    p_points: tuple
    q_points: tuple
    tyurin: tuple
    genus: int = 0

    def __post_init__(self):
        if self.genus != 0:
            raise ValueError("only genus 0 is supported")
        ps = tuple(Q(p) for p in self.p_points)
        qs = tuple(_point(q) for q in self.q_points)
        ty = tuple(t if isinstance(t, TyurinDatum) else TyurinDatum.from_json(t) for t in self.tyurin)
        object.__setattr__(self, "p_points", ps)
        object.__setattr__(self, "q_points", qs)
        object.__setattr__(self, "tyurin", ty)
        if not ps or not qs:
            raise ValueError("need at least one P-point and one Q-point")
        if qs.count(INF) > 1:
            raise ValueError("at most one Q-point may be the point at infinity")
        locs = list(ps) + [q for q in qs if q != INF] + [t.gamma for t in ty]
        if len(set(locs)) != len(locs):
            raise ValueError("marked points must be pairwise distinct")

    @property
    def N(self) -> int:
        return len(self.p_points)

    @property
    def M(self) -> int:
        return len(self.q_points)

    @property
    def K(self) -> int:
        return len(self.tyurin)

    @property
    def gammas(self) -> tuple:
        return tuple(t.gamma for t in self.tyurin)

    def to_json(self) -> dict:
        return {"genus": 0, "P": [fmt(p) for p in self.p_points],
                "Q": [_fmt_point(q) for q in self.q_points],
                "tyurin": [t.to_json() for t in self.tyurin]}

    @classmethod
    def from_json(cls, d) -> "SurfaceSpec":
        return cls(tuple(d["P"]), tuple(d["Q"]), tuple(TyurinDatum.from_json(t) for t in d["tyurin"]),
                   int(d.get("genus", 0)))


@dataclass(frozen=True)
class GradingSpec:
    """Weights a_j > 0 and a rule for b_{m,j}.

    Rules: "const:b1,b2,..." or "floorceil" (a_1 m rounded up, the rest rounded
    down, so that every a_j m + b_{m,j} is an integer).
    """
    a: tuple
    b_rule: str = "const:0"

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Q(x) for x in self.a))
        if not self.a or any(x <= 0 for x in self.a):
            raise InvalidGrading("weights a_j must be positive")
        rule = self.b_rule.strip()
        if rule.startswith("const:"):
            try:
                bs = tuple(Q(x) for x in rule[6:].split(","))
            except (ValueError, TypeError) as exc:
                raise InvalidGrading(f"bad b rule {rule!r}: {exc}") from None
            if len(bs) == 1:
                bs = bs * len(self.a)
            if len(bs) != len(self.a):
                raise InvalidGrading(f"rule {rule!r} gives {len(bs)} values for {len(self.a)} Q-points")
        elif rule != "floorceil":
            raise InvalidGrading(f"unknown b rule {rule!r}")
        object.__setattr__(self, "b_rule", rule)

    @property
    def period(self) -> int:
        return lcm(*(int(x.denominator) for x in self.a))

    def b(self, m: int) -> tuple:
        if self.b_rule.startswith("const:"):
            bs = tuple(Q(x) for x in self.b_rule[6:].split(","))
            return bs * len(self.a) if len(bs) == 1 else bs
        out = []
        for j, a in enumerate(self.a):
            am = a * m
            r = ceil(Fraction(int(am.numerator), int(am.denominator))) if j == 0 else \
                floor(Fraction(int(am.numerator), int(am.denominator)))
            out.append(Q(r) - am)
        return tuple(out)

    def q_orders(self, m: int) -> tuple:
        """n_j = a_j m + b_{m,j}, the allowed pole order at Q_j."""
        return tuple(a * m + b for a, b in zip(self.a, self.b(m)))

    @property
    def bound(self):
        """Exact max |b_{m,j}| (b is periodic in m with period lcm of the denominators of a)."""
        return max(abs(x) for m in range(self.period) for x in self.b(m))

    def validate(self, spec: SurfaceSpec, mrange=range(-6, 7)):
        if len(self.a) != spec.M:
            raise InvalidGrading(f"{len(self.a)} weights for {spec.M} Q-points")
        if sum(self.a) != spec.N:
            raise InvalidGrading(f"sum of a_j is {fmt(sum(self.a))}, expected N = {spec.N}")
        prev = None
        for m in mrange:
            n = self.q_orders(m)
            if any(x.denominator != 1 for x in n):
                raise InvalidGrading(f"a_j m + b_(m,j) not integral at m = {m}")
            if sum(self.b(m)) != spec.N + spec.genus - 1:
                raise InvalidGrading(f"sum of b_(m,j) is {fmt(sum(self.b(m)))} at m = {m}, expected N + g - 1")
            if prev is not None and any(x < y for x, y in zip(n, prev)):
                raise InvalidGrading(f"a_j m + b_(m,j) decreases at m = {m}")
            prev = n

    def to_json(self) -> dict:
        return {"a": [fmt(x) for x in self.a], "b": self.b_rule}

    @classmethod
    def from_json(cls, d) -> "GradingSpec":
        return cls(tuple(d["a"]), str(d.get("b", "const:0")))


def divisor_degree(spec: SurfaceSpec, gspec: GradingSpec, m: int) -> int:
    gspec.validate(spec, range(m, m + 1))
    d = -m * spec.N + sum(gspec.q_orders(m)) + 2 * spec.K
    return int(d)


# -- scalar polynomials (lists of mpq, lowest power first) -----------------------

def poly_mul(p, q):
    if len(p) == 0 or len(q) == 0:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_from_factors(factors: dict):
    """prod (z - c)^e."""
    out = [ONE]
    for c, e in sorted(factors.items()):
        for _ in range(e):
            out = poly_mul(out, [-c, ONE])
    return out


def taylor_shift(p, c):
    """Coefficients of p(c + t) in t; works for rows of vectors too."""
    n = len(p)
    out = [None] * n
    for r in range(n):
        acc = p[r] * 0 if r < n else None
        for i in range(r, n):
            acc = acc + p[i] * (comb(i, r) * c ** (i - r))
        out[r] = acc
    return out


def series_div(num, den, n: int):
    """First n power-series coefficients of num / den with den[0] != 0."""
    inv0 = ONE / den[0]
    out = []
    for k in range(n):
        acc = num[k] if k < len(num) else num[0] * 0
        for i in range(1, min(k, len(den) - 1) + 1):
            if den[i]:
                acc = acc - den[i] * out[k - i]
        out.append(acc * inv0)
    return out


def laurent(num, den_factors: dict, loc, lo: int, hi: int) -> dict:
    """Laurent coefficients of num(z) / prod (z - c)^e at loc (or at infinity, in w = 1/z).

    ``num`` is a list of coefficients (scalars or numpy vectors).  Returns
    {order: coefficient} for lo <= order <= hi.
    """
    zero = num[0] * 0 if len(num) else ZERO
    if loc == INF:
        D = len(num) - 1
        den = poly_from_factors(den_factors)
        E = len(den) - 1
        start = E - D
        ntil = list(reversed(num))
        dtil = list(reversed(den))
    else:
        e = den_factors.get(loc, 0)
        rest = {c: k for c, k in den_factors.items() if c != loc}
        start = -e
        ntil = taylor_shift(num, loc) if len(num) else []
        dtil = taylor_shift(poly_from_factors({c - loc: k for c, k in rest.items()}), ZERO)
    need = hi - start + 1
    ser = series_div(ntil, dtil, need) if need > 0 and len(ntil) else []
    out = {}
    for n in range(lo, hi + 1):
        k = n - start
        out[n] = ser[k] if 0 <= k < len(ser) else zero
    return out


def vanishing_rows(c, order: int, length: int):
    """Linear forms on coefficients (p_0..p_{length-1}) giving the Taylor coefficients of p at c below ``order``."""
    rows = []
    for r in range(order):
        rows.append([Q(comb(i, r)) * c ** (i - r) if i >= r else ZERO for i in range(length)])
    return rows


# -- global elements -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GlobalElement:
    numerator: np.ndarray      # (deg + 1, 14)
    den: tuple                 # sorted ((point, exponent), ...)
    degree: int | None = None

    @property
    def den_factors(self) -> dict:
        return dict(self.den)

    def is_zero(self) -> bool:
        return not any(v for v in self.numerator.flat)

    def to_json(self) -> dict:
        return {"numerator": [[fmt(v) for v in row] for row in self.numerator],
                "den": [[fmt(c), e] for c, e in self.den], "degree": self.degree}

    @classmethod
    def from_json(cls, d) -> "GlobalElement":
        num = qarray([[Q(v) for v in row] for row in d["numerator"]]).reshape(-1, DIM)
        return cls(num, tuple((Q(c), int(e)) for c, e in d["den"]), d.get("degree"))

    def scale(self, c) -> "GlobalElement":
        return GlobalElement(self.numerator * Q(c), self.den, self.degree)


def _den_tuple(factors: dict) -> tuple:
    return tuple(sorted((c, e) for c, e in factors.items() if e > 0))


def _common(xs) -> tuple[dict, list]:
    """Bring elements to one denominator; returns (factors, list of numerators as lists of rows)."""
    common = {}
    for x in xs:
        for c, e in x.den:
            common[c] = max(common.get(c, 0), e)
    nums = []
    for x in xs:
        own = x.den_factors
        mult = poly_from_factors({c: e - own.get(c, 0) for c, e in common.items()})
        rows = [x.numerator[i] for i in range(x.numerator.shape[0])]
        nums.append(poly_mul_vec(mult, rows))
    return common, nums


def poly_mul_vec(p, rows):
    if not rows:
        return []
    out = [qzeros(DIM) for _ in range(len(p) + len(rows) - 1)]
    for i, a in enumerate(p):
        if a:
            for j, r in enumerate(rows):
                out[i + j] = out[i + j] + a * r
    return out


def element_add(x: GlobalElement, y: GlobalElement) -> GlobalElement:
    common, (nx, ny) = _common([x, y])
    n = max(len(nx), len(ny))
    rows = [(nx[i] if i < len(nx) else qzeros(DIM)) + (ny[i] if i < len(ny) else qzeros(DIM)) for i in range(n)]
    return GlobalElement(qarray(rows).reshape(-1, DIM), _den_tuple(common))


def expand_at(L: GlobalElement, location, T: int = 3, lo: int | None = None) -> MatrixJet:
    """Laurent jet of L at a finite point or at "inf" (local coordinate 1/z) through order T."""
    loc = _point(location)
    rows = [L.numerator[i] for i in range(L.numerator.shape[0])]
    if lo is None:
        if loc == INF:
            D = len(rows) - 1
            E = sum(e for _, e in L.den)
            lo = min(E - D, -2)
        else:
            lo = min(-L.den_factors.get(loc, 0), -2)
    co = laurent(rows, L.den_factors, loc, lo, T)
    return MatrixJet({n: G2Element.from_coords(v) for n, v in co.items()}, lo, T)


def _left_table(x: GlobalElement) -> np.ndarray:
    """XC[i, j, k] = sum_p X[i, p] C[p, j, k]: the ad-action of each numerator row."""
    return np.tensordot(x.numerator, structure_constants(), axes=([1], [0]))


def global_bracket(x: GlobalElement, y: GlobalElement, left=None) -> GlobalElement:
    """Pointwise bracket; ``left`` may carry a precomputed _left_table(x)."""
    XC = _left_table(x) if left is None else left
    Y = y.numerator
    # P[i, k, j] = k-th coordinate of [X_i, Y_j]
    P = np.tensordot(XC, Y, axes=([1], [1]))
    n = XC.shape[0] + Y.shape[0] - 1
    out = qzeros(n, DIM)
    for i in range(XC.shape[0]):
        for j in range(Y.shape[0]):
            out[i + j] += P[i, :, j]
    fx, fy = x.den_factors, y.den_factors
    den = {c: fx.get(c, 0) + fy.get(c, 0) for c in set(fx) | set(fy)}
    deg = x.degree + y.degree if x.degree is not None and y.degree is not None else None
    return GlobalElement(out, _den_tuple(den), deg)


# -- homogeneous subspaces ----------------------------------------------------------

@dataclass(frozen=True)
class ScalarSpace:
    """Scalar rational functions with (f) + D_m >= 0 (before any Tyurin constraint)."""
    den: tuple
    basis: tuple      # numerator coefficient tuples, common length


def _scalar_data(spec: SurfaceSpec, gspec: GradingSpec, m: int):
    n_q = gspec.q_orders(m)
    den, zeros = {}, []
    for p in spec.p_points:
        if m < 0:
            den[p] = -m
        elif m > 0:
            zeros.append((p, m))
    infinity_order = 0          # allowed pole order at infinity
    for q, n in zip(spec.q_points, n_q):
        n = int(n)
        if q == INF:
            infinity_order = n
        elif n > 0:
            den[q] = n
        elif n < 0:
            zeros.append((q, -n))
    for g in spec.gammas:
        den[g] = 2
    deg_den = sum(den.values())
    return den, zeros, deg_den + infinity_order


@lru_cache(maxsize=256)
def scalar_space(spec: SurfaceSpec, gspec: GradingSpec, m: int) -> ScalarSpace:
    den, zeros, dmax = _scalar_data(spec, gspec, m)
    length = dmax + 1
    if length <= 0:
        return ScalarSpace(_den_tuple(den), ())
    rows = []
    for c, k in zeros:
        rows += vanishing_rows(c, k, length)
    if rows:
        kern = kernel_basis(qarray(rows))
    else:
        kern = [np.array([ONE if i == j else ZERO for i in range(length)], dtype=object) for j in range(length)]
    return ScalarSpace(_den_tuple(den), tuple(tuple(v) for v in kern))


def _gamma_block(space: ScalarSpace, d: TyurinDatum) -> np.ndarray:
    """28 x (14 dim V) constraint block at one Tyurin point."""
    Ann = annihilator(d)
    nv = len(space.basis)
    c = [laurent(list(v), dict(space.den), d.gamma, -2, 1) for v in space.basis]
    block = qzeros(Ann.shape[0], DIM * nv)
    for k in range(nv):
        for n in range(-2, 2):
            if c[k][n]:
                block[:, DIM * k: DIM * (k + 1)] += c[k][n] * Ann[:, DIM * (n + 2): DIM * (n + 3)]
    return block


@lru_cache(maxsize=256)
def _homogeneous_coeffs(spec: SurfaceSpec, gspec: GradingSpec, m: int):
    gspec.validate(spec, range(m, m + 1))
    space = scalar_space(spec, gspec, m)
    nv = len(space.basis)
    if nv != spec.N + 2 * spec.K:
        raise DegenerateConfiguration(f"scalar space at m = {m} has dimension {nv}, expected {spec.N + 2 * spec.K}")
    try:
        blocks = [_gamma_block(space, d) for d in spec.tyurin]
    except DegenerateDatum as exc:
        raise DegenerateConfiguration(str(exc)) from None
    if blocks:
        kern = kernel_basis(np.vstack(blocks))
    else:
        kern = [np.array([ONE if i == j else ZERO for i in range(DIM * nv)], dtype=object)
                for j in range(DIM * nv)]
    return space, tuple(kern)


def _element_from_coeffs(space: ScalarSpace, X, m) -> GlobalElement:
    """sum_k v_k(z) X_k with X the flattened (dim V, 14) coefficient array."""
    X = np.asarray(X, dtype=object).reshape(-1, DIM)
    length = len(space.basis[0])
    V = qarray([list(v) for v in space.basis]).reshape(-1, length)
    return GlobalElement(V.T.dot(X), space.den, m)


@lru_cache(maxsize=256)
def _homogeneous_basis(spec: SurfaceSpec, gspec: GradingSpec, m: int) -> tuple:
    space, kern = _homogeneous_coeffs(spec, gspec, m)
    return tuple(_element_from_coeffs(space, v, m) for v in kern)


def homogeneous_basis(spec: SurfaceSpec, gspec: GradingSpec, m: int, strict: bool = True) -> list:
    """Basis of L_m.  With strict, a dimension other than 14N raises DegenerateConfiguration.

    For N = K = 1 the scalar space has dimension 3, so the order-1 coefficient
    at the Tyurin point is a fixed combination of the lower three and the
    first-order relation becomes dependent: dim L_m = 15 there.
    """
    basis = _homogeneous_basis(spec, gspec, m)
    if strict and len(basis) != DIM * spec.N:
        raise DegenerateConfiguration(f"dim L_{m} = {len(basis)}, expected {DIM * spec.N}")
    return list(basis)


def dim_homogeneous(spec: SurfaceSpec, gspec: GradingSpec, m: int) -> int:
    return len(_homogeneous_basis(spec, gspec, m))


def homogeneous_coefficients(spec: SurfaceSpec, gspec: GradingSpec, m: int):
    """(scalar space, coefficient vectors): basis element i is sum_k v_k X^(i)_k."""
    return _homogeneous_coeffs(spec, gspec, m)


# -- decomposition and grading -------------------------------------------------

def _flatten(elements):
    """Columns of numerator coefficients over a common denominator."""
    common, nums = _common(elements)
    n = max(len(x) for x in nums)
    cols = []
    for rows in nums:
        v = qzeros(n * DIM)
        for i, r in enumerate(rows):
            v[DIM * i: DIM * (i + 1)] = r
        cols.append(v)
    return common, np.array(cols, dtype=object).T


def decompose_many(spec, gspec, elements, window) -> list:
    """Coordinates of each element in the concatenated bases of degrees m_lo..m_hi."""
    lo, hi = window
    degrees = list(range(lo, hi + 1))
    basis = [b for m in degrees for b in _homogeneous_basis(spec, gspec, m)]
    _, M = _flatten(basis + list(elements))
    A, B = M[:, :len(basis)], M[:, len(basis):]
    try:
        X = solve_many(A, B)
    except ValueError:
        raise DegenerateConfiguration("bases are not jointly independent on the window") from None
    except Inconsistent:
        raise NotInWindow(f"not in the span of degrees {lo}..{hi}") from None
    sizes = [len(_homogeneous_basis(spec, gspec, m)) for m in degrees]
    starts = np.cumsum([0] + sizes)
    out = []
    for col in range(X.shape[1]):
        out.append({m: tuple(X[starts[k]: starts[k + 1], col]) for k, m in enumerate(degrees)})
    return out


def decompose(spec, gspec, L: GlobalElement, window) -> dict:
    return decompose_many(spec, gspec, [L], window)[0]


def joint_rank(spec, gspec, window) -> tuple[int, int]:
    lo, hi = window
    basis = [b for m in range(lo, hi + 1) for b in _homogeneous_basis(spec, gspec, m)]
    _, M = _flatten(basis)
    return rank(M), len(basis)


@dataclass
class SpreadReport:
    k: int
    l: int
    spread: int | None
    probe: int
    error: str | None = None

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.l, "spread": self.spread, "probe": self.probe,
                "error": self.error}


def _span_contains(basis, elements) -> bool:
    _, M = _flatten(list(basis) + list(elements))
    return rank(M[:, :len(basis)]) == rank(M)


def grading_check(spec, gspec, k: int, l: int, probe: int = 2) -> SpreadReport:
    """Smallest S <= probe with every [e, f] (e in L_k, f in L_l) in L_{k+l} + ... + L_{k+l+S}.

    Measured by span membership, so it stays meaningful when the degree
    bases are not jointly independent.
    """
    xs, ys = _homogeneous_basis(spec, gspec, k), _homogeneous_basis(spec, gspec, l)
    brackets = []
    for x in xs:
        XC = _left_table(x)
        brackets += [global_bracket(x, y, XC) for y in ys]
    brackets = [b for b in brackets if not b.is_zero()]
    if not brackets:
        return SpreadReport(k, l, 0, probe)
    basis = []
    for S in range(probe + 1):
        basis += _homogeneous_basis(spec, gspec, k + l + S)
        if _span_contains(basis, brackets):
            return SpreadReport(k, l, S, probe)
    return SpreadReport(k, l, None, probe, error=f"brackets leave degrees {k + l}..{k + l + probe}")


# -- canonical desk configurations -------------------------------------------------

DATA = (
    TyurinDatum(1, (1, 1, 0), (1, -1, 1)),
    TyurinDatum(2, (1, 0, 2), (2, 1, -1)),
)


def canonical(name: str) -> tuple[SurfaceSpec, GradingSpec]:
    """(N, M, K) desk configurations "111", "112", "211", "121", plus the
    two-Tyurin-point companions "212" and "122" of the multipoint ones."""
    if name == "111":
        return SurfaceSpec((0,), (INF,), DATA[:1]), GradingSpec((1,), "const:0")
    if name == "112":
        return SurfaceSpec((0,), (INF,), DATA), GradingSpec((1,), "const:0")
    if name == "211":
        return (SurfaceSpec((0, -1), (INF,), (TyurinDatum(2, (1, 1, 0), (1, -1, 1)),)),
                GradingSpec((2,), "const:1"))
    if name == "121":
        return (SurfaceSpec((0,), (INF, -1), (TyurinDatum(1, (1, 1, 0), (1, -1, 1)),)),
                GradingSpec(("1/2", "1/2"), "floorceil"))
    if name == "212":
        return SurfaceSpec((0, -1), (INF,), DATA), GradingSpec((2,), "const:1")
    if name == "122":
        return SurfaceSpec((0,), (INF, -1), DATA), GradingSpec(("1/2", "1/2"), "floorceil")
    raise KeyError(name)


CANONICAL = ("111", "112", "211", "121")
COMPANIONS = ("212", "122")
