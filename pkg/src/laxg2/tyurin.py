"""Admissibility of Laurent jets at a Tyurin point.

A jet L = L_-2 z^-2 + L_-1 z^-1 + L_0 + L_1 z + ... is admissible at the
datum (alpha1, alpha2) when

* L_-2 = (0, 0, mu alpha1 alpha2^t),
* L_-1 = (beta01 alpha1, beta02 alpha2, alpha1 beta2^t - beta1 alpha2^t)
  with alpha1.beta2 = 0 and alpha2.beta1 = 0,
* L_0 = (a1, a2, A) with alpha1.a2 = alpha2.a1 = 0, A alpha1 = kappa1 alpha1,
  -A^t alpha2 = kappa2 alpha2,
* alpha2^t B alpha1 = 0 for the matrix slot B of L_1.

The decomposition of the residue matrix has a one-parameter gauge
(beta1, beta2) -> (beta1 + s alpha1, beta2 + s alpha2) that the
orthogonality relations leave untouched; extraction fixes it with
alpha1.beta1 = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exact import (ZERO, Inconsistent, Q, affine_system, fmt, independent_subset,
                    kernel_basis, matrix_of, qarray, qzeros, rank, solve_affine)
from .g2 import (DIM, G2Element, ZERO3, cross, dot, full_coords, mscale, mvec,
                 outer, transpose, vec, vscale, vsub, msub)
from .jets import MatrixJet, jet_commutator

GENERIC_RELATIONS = 28
# relation counts as stated by the parameter count in the almost-graded proof
CLAIMED_BREAKDOWN = {"residue": 8, "order_minus2": 13, "eigen": 6, "first_order": 1}


class DegenerateDatum(ValueError):
    pass


class NotAdmissible(ValueError):
    def __init__(self, order: int, condition: str, detail: str = ""):
        self.order = order
        self.condition = condition
        super().__init__(f"L_{order}: {condition} {detail}".rstrip())


@dataclass(frozen=True)
class TyurinDatum:
    gamma: object
    alpha1: tuple
    alpha2: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma", Q(self.gamma))
        object.__setattr__(self, "alpha1", vec(self.alpha1))
        object.__setattr__(self, "alpha2", vec(self.alpha2))
        if not any(self.alpha1) or not any(self.alpha2):
            raise DegenerateDatum("alpha1 and alpha2 must be nonzero")
        if dot(self.alpha1, self.alpha2) != 0:
            raise DegenerateDatum(
                f"alpha1.alpha2 = {fmt(dot(self.alpha1, self.alpha2))}, orthogonality required")
        if not any(cross(self.alpha1, self.alpha2)):
            raise DegenerateDatum("alpha1 and alpha2 are linearly dependent")

    def to_json(self) -> dict:
        return {"gamma": fmt(self.gamma), "alpha1": [fmt(x) for x in self.alpha1],
                "alpha2": [fmt(x) for x in self.alpha2]}

    @classmethod
    def from_json(cls, d) -> "TyurinDatum":
        return cls(Q(d["gamma"]), vec(d["alpha1"]), vec(d["alpha2"]))


def random_datum(rng, gamma=0, bound: int = 4) -> TyurinDatum:
    """alpha1 random, alpha2 = alpha1 x r for random r; resamples until valid."""
    while True:
        a1 = tuple(int(v) for v in rng.integers(-bound, bound + 1, size=3))
        r = tuple(int(v) for v in rng.integers(-bound, bound + 1, size=3))
        a2 = cross(vec(a1), vec(r))
        try:
            return TyurinDatum(gamma, a1, a2)
        except DegenerateDatum:
            continue


@dataclass(frozen=True)
class AdmissibleParams:
    mu: object = ZERO
    beta01: object = ZERO
    beta02: object = ZERO
    beta1: tuple = ZERO3
    beta2: tuple = ZERO3
    kappa1: object = ZERO
    kappa2: object = ZERO
    lambda1: object = ZERO
    lambda2: object = ZERO

    def vector(self) -> tuple:
        return ((self.mu, self.beta01, self.beta02) + tuple(self.beta1) + tuple(self.beta2)
                + (self.kappa1, self.kappa2, self.lambda1, self.lambda2))

    @property
    def kappa_tilde(self) -> tuple:
        return self.kappa1 + self.lambda1, self.kappa2 + self.lambda2

    def to_json(self) -> dict:
        return {"mu": fmt(self.mu), "beta01": fmt(self.beta01), "beta02": fmt(self.beta02),
                "beta1": [fmt(x) for x in self.beta1], "beta2": [fmt(x) for x in self.beta2],
                "kappa1": fmt(self.kappa1), "kappa2": fmt(self.kappa2),
                "lambda1": fmt(self.lambda1), "lambda2": fmt(self.lambda2)}


# -- shapes ------------------------------------------------------------------

def order_minus2_shape(d: TyurinDatum, mu) -> G2Element:
    return G2Element(ZERO3, ZERO3, mscale(Q(mu), outer(d.alpha1, d.alpha2)))


def residue_matrix(d: TyurinDatum, beta1, beta2):
    """alpha1 beta2^t - beta1 alpha2^t (traceless only under orthogonality)."""
    return msub(outer(d.alpha1, beta2), outer(beta1, d.alpha2))


def residue_shape(d: TyurinDatum, beta01, beta02, beta1, beta2) -> G2Element:
    return G2Element(vscale(Q(beta01), d.alpha1), vscale(Q(beta02), d.alpha2),
                     residue_matrix(d, vec(beta1), vec(beta2)))


def _proportional(v, a):
    """c with v = c a, or None."""
    k = next(i for i in range(3) if a[i])
    c = v[k] / a[k]
    return c if all(v[i] == c * a[i] for i in range(3)) else None


# -- single-order checks ---------------------------------------------------

def check_order_minus2(c: G2Element, d: TyurinDatum):
    if any(c.a1):
        raise NotAdmissible(-2, "shape", "a1 must vanish")
    if any(c.a2):
        raise NotAdmissible(-2, "shape", "a2 must vanish")
    target = outer(d.alpha1, d.alpha2)
    i, j = next((i, j) for i in range(3) for j in range(3) if target[i][j])
    mu = c.A[i][j] / target[i][j]
    if c.A != mscale(mu, target):
        raise NotAdmissible(-2, "shape", "A is not a multiple of alpha1 alpha2^t")
    return mu


def _solve_residue_matrix(A, d: TyurinDatum):
    """(beta1, beta2) with A = alpha1 beta2^t - beta1 alpha2^t and alpha1.beta1 = 0."""
    def resid(u):
        b1, b2 = tuple(u[0:3]), tuple(u[3:6])
        M = residue_matrix(d, b1, b2)
        return [M[i][j] - A[i][j] for i in range(3) for j in range(3)] + [dot(d.alpha1, b1)]
    sol = solve_affine(affine_system(resid, 6))
    # the gauge condition makes the solution unique
    assert not sol.kernel
    return tuple(sol.particular[0:3]), tuple(sol.particular[3:6])


def check_residue(c: G2Element, d: TyurinDatum, *, orthogonality: bool = True):
    """(beta01, beta02, beta1, beta2) for an admissible residue coefficient."""
    beta01 = _proportional(c.a1, d.alpha1)
    if beta01 is None:
        raise NotAdmissible(-1, "shape", "a1 is not a multiple of alpha1")
    beta02 = _proportional(c.a2, d.alpha2)
    if beta02 is None:
        raise NotAdmissible(-1, "shape", "a2 is not a multiple of alpha2")
    try:
        beta1, beta2 = _solve_residue_matrix(c.A, d)
    except Inconsistent:
        raise NotAdmissible(-1, "shape", "A is not alpha1 beta2^t - beta1 alpha2^t") from None
    if orthogonality:
        if dot(d.alpha1, beta2) != 0:
            raise NotAdmissible(-1, "orthogonality", f"alpha1.beta2 = {fmt(dot(d.alpha1, beta2))}")
        if dot(d.alpha2, beta1) != 0:
            raise NotAdmissible(-1, "orthogonality", f"alpha2.beta1 = {fmt(dot(d.alpha2, beta1))}")
    return beta01, beta02, beta1, beta2


def check_order_zero(c: G2Element, d: TyurinDatum):
    """(kappa1, kappa2, lambda1, lambda2) for an admissible order-0 coefficient."""
    a1, a2 = d.alpha1, d.alpha2
    if dot(a1, c.a2) != 0:
        raise NotAdmissible(0, "eigen", "alpha1.a2 != 0")
    if dot(a2, c.a1) != 0:
        raise NotAdmissible(0, "eigen", "alpha2.a1 != 0")
    kappa1 = _proportional(mvec(c.A, a1), a1)
    if kappa1 is None:
        raise NotAdmissible(0, "eigen", "A alpha1 is not a multiple of alpha1")
    kappa2 = _proportional(vscale(-1, mvec(transpose(c.A), a2)), a2)
    if kappa2 is None:
        raise NotAdmissible(0, "eigen", "-A^t alpha2 is not a multiple of alpha2")
    lambda1 = _proportional(cross(c.a2, a2), a1)
    lambda2 = _proportional(cross(c.a1, a1), a2)
    # both hold automatically once the orthogonality conditions pass
    assert lambda1 is not None and lambda2 is not None
    return kappa1, kappa2, lambda1, lambda2


def check_order_one(c: G2Element, d: TyurinDatum) -> bool:
    v = dot(d.alpha2, mvec(c.A, d.alpha1))
    if v != 0:
        raise NotAdmissible(1, "first_order", f"alpha2^t B alpha1 = {fmt(v)}")
    return True


# -- whole jets ----------------------------------------------------------------

CONDITIONS = ("order_minus2", "residue_shape", "orthogonality", "eigen", "first_order")


@dataclass
class AdmissibilityReport:
    lines: dict = field(default_factory=dict)
    params: AdmissibleParams | None = None

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.lines.values())

    def failed(self) -> list:
        return [name for name, (ok, _) in self.lines.items() if not ok]

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "lines": {k: {"ok": ok, "detail": msg} for k, (ok, msg) in self.lines.items()},
                "params": self.params.to_json() if self.params else None}


def is_admissible(j: MatrixJet, d: TyurinDatum) -> AdmissibilityReport:
    if j.lo > -2 or j.hi < 1:
        raise ValueError(f"jet window [{j.lo}, {j.hi}] must contain [-2, 1]")
    rep = AdmissibilityReport()
    low = [n for n in j.coeffs if n < -2]
    if low:
        rep.lines["pole_order"] = (False, f"nonzero coefficients at orders {sorted(low)}")
    vals = {}

    def run(name, fn):
        try:
            vals[name] = fn()
            rep.lines[name] = (True, "")
        except NotAdmissible as exc:
            rep.lines[name] = (False, str(exc))

    run("order_minus2", lambda: check_order_minus2(j[-2], d))
    run("residue_shape", lambda: check_residue(j[-1], d, orthogonality=False))
    if rep.lines["residue_shape"][0]:
        run("orthogonality", lambda: check_residue(j[-1], d))
    else:
        rep.lines["orthogonality"] = (False, "residue shape failed")
    run("eigen", lambda: check_order_zero(j[0], d))
    run("first_order", lambda: check_order_one(j[1], d))
    if rep.ok:
        b01, b02, b1, b2 = vals["orthogonality"]
        k1, k2, l1, l2 = vals["eigen"]
        rep.params = AdmissibleParams(vals["order_minus2"], b01, b02, b1, b2, k1, k2, l1, l2)
    return rep


def extract_params(j: MatrixJet, d: TyurinDatum) -> AdmissibleParams:
    rep = is_admissible(j, d)
    if not rep.ok:
        name = rep.failed()[0]
        raise NotAdmissible({"order_minus2": -2, "residue_shape": -1, "orthogonality": -1,
                             "eigen": 0, "first_order": 1}.get(name, -3), name, rep.lines[name][1])
    return rep.params


# -- constraint systems -------------------------------------------------------

N_AUX = 11  # mu, beta01, beta02, beta1 (3), beta2 (3), kappa1, kappa2


def _constraint_residuals(u, d: TyurinDatum, n_orders: int):
    """Residuals of every admissibility condition; u = coefficient coords (orders -2.. ) + aux."""
    coeffs = [G2Element.from_coords(u[DIM * k: DIM * (k + 1)]) for k in range(n_orders)]
    aux = u[DIM * n_orders:]
    mu, b01, b02 = aux[0], aux[1], aux[2]
    b1, b2 = tuple(aux[3:6]), tuple(aux[6:9])
    k1, k2 = aux[9], aux[10]
    a1, a2 = d.alpha1, d.alpha2
    out = []
    out += list(np.subtract(full_coords(coeffs[0]), full_coords(order_minus2_shape(d, mu))))
    target = vscale(b01, a1) + vscale(b02, a2) + tuple(v for row in residue_matrix(d, b1, b2) for v in row)
    out += list(np.subtract(full_coords(coeffs[1]), target))
    out += [dot(a1, b2), dot(a2, b1)]
    L0 = coeffs[2]
    out += [dot(a1, L0.a2), dot(a2, L0.a1)]
    out += list(vsub(mvec(L0.A, a1), vscale(k1, a1)))
    out += list(vsub(vscale(-1, mvec(transpose(L0.A), a2)), vscale(k2, a2)))
    out += [dot(a2, mvec(coeffs[3].A, a1))]
    return out


def constraint_matrix(d: TyurinDatum, T: int = 1) -> np.ndarray:
    """Homogeneous system over 14 (T + 3) coefficient coordinates plus 11 auxiliary parameters."""
    if T < 1:
        raise ValueError("T must be at least 1")
    n = T + 3
    return matrix_of(lambda u: _constraint_residuals(u, d, n), DIM * n + N_AUX)


def _jet_from_vector(v, T: int) -> MatrixJet:
    return MatrixJet({k - 2: G2Element.from_coords(v[DIM * k: DIM * (k + 1)]) for k in range(T + 3)}, -2, T)


@lru_cache(maxsize=64)
def _basis_vectors(d: TyurinDatum, T: int) -> tuple:
    kern = kernel_basis(constraint_matrix(d, T))
    ncoef = DIM * (T + 3)
    proj = [v[:ncoef] for v in kern]
    keep = independent_subset(proj)
    vecs = tuple(tuple(proj[i]) for i in keep)
    expected = ncoef - GENERIC_RELATIONS
    if len(vecs) != expected:
        raise DegenerateDatum(f"admissible space has dimension {len(vecs)}, expected {expected}")
    return vecs


def admissible_jet_basis(d: TyurinDatum, T: int = 3) -> list:
    return [_jet_from_vector(v, T) for v in _basis_vectors(d, T)]


@lru_cache(maxsize=64)
def annihilator(d: TyurinDatum) -> np.ndarray:
    """28 x 56 matrix whose kernel is the admissible (L_-2, L_-1, L_0, L_1)."""
    basis = _basis_vectors(d, 1)
    rows = kernel_basis(qarray(basis))
    if len(rows) != GENERIC_RELATIONS:
        raise DegenerateDatum(f"{len(rows)} independent relations, expected {GENERIC_RELATIONS}")
    return qarray(rows)


@dataclass(frozen=True)
class RelationCount:
    residue: int
    order_minus2: int
    eigen: int
    first_order: int

    @property
    def total(self) -> int:
        return self.residue + self.order_minus2 + self.eigen + self.first_order

    def as_dict(self) -> dict:
        return {"residue": self.residue, "order_minus2": self.order_minus2, "eigen": self.eigen,
                "first_order": self.first_order, "total": self.total}


def _codim(residuals, n_aux: int) -> int:
    """14 - dim of the projection to coefficient coords of the kernel of a residual system."""
    kern = kernel_basis(matrix_of(residuals, DIM + n_aux))
    if not kern:
        return DIM
    return DIM - rank(qarray([list(v[:DIM]) for v in kern]))


def effective_relation_count(d: TyurinDatum) -> RelationCount:
    """Codimension of each admissible coefficient subspace, by exact rank."""
    a1, a2 = d.alpha1, d.alpha2

    def minus2(u):
        c = G2Element.from_coords(u[:DIM])
        return list(np.subtract(full_coords(c), full_coords(order_minus2_shape(d, u[DIM]))))

    def resid(u):
        c = G2Element.from_coords(u[:DIM])
        b01, b02, b1, b2 = u[DIM], u[DIM + 1], tuple(u[DIM + 2:DIM + 5]), tuple(u[DIM + 5:DIM + 8])
        target = vscale(b01, a1) + vscale(b02, a2) + tuple(v for row in residue_matrix(d, b1, b2) for v in row)
        return list(np.subtract(full_coords(c), target)) + [dot(a1, b2), dot(a2, b1)]

    def eigen(u):
        c = G2Element.from_coords(u[:DIM])
        k1, k2 = u[DIM], u[DIM + 1]
        return ([dot(a1, c.a2), dot(a2, c.a1)] + list(vsub(mvec(c.A, a1), vscale(k1, a1)))
                + list(vsub(vscale(-1, mvec(transpose(c.A), a2)), vscale(k2, a2))))

    def first(u):
        c = G2Element.from_coords(u[:DIM])
        return [dot(a2, mvec(c.A, a1))]

    count = RelationCount(_codim(resid, 8), _codim(minus2, 1), _codim(eigen, 2), _codim(first, 0))
    if count.total != GENERIC_RELATIONS:
        raise DegenerateDatum(f"{count.total} relations, expected {GENERIC_RELATIONS}")
    return count


def random_admissible(d: TyurinDatum, T: int = 3, seed: int = 0, bound: int = 3) -> MatrixJet:
    rng = np.random.default_rng(seed)
    return random_admissible_rng(d, T, rng, bound)


def random_admissible_rng(d: TyurinDatum, T: int, rng, bound: int = 3) -> MatrixJet:
    vecs = _basis_vectors(d, T)
    coef = [Q(int(c)) for c in rng.integers(-bound, bound + 1, size=len(vecs))]
    total = qzeros(DIM * (T + 3))
    for c, v in zip(coef, vecs):
        if c:
            total = total + c * np.array(v, dtype=object)
    return _jet_from_vector(total, T)


# -- closure -------------------------------------------------------------------

def commutator_mu(px: AdmissibleParams, py: AdmissibleParams):
    """mu of [L_-1, L'_-1] from the residue parameters of L and L'."""
    return (3 * (px.beta02 * py.beta01 - px.beta01 * py.beta02)
            + dot(py.beta2, px.beta1) - dot(px.beta2, py.beta1))


def commutator_mu_full(px: AdmissibleParams, py: AdmissibleParams):
    """mu of the whole order -2 coefficient of [L, L'].

    [L_-2, L'_0] + [L_0, L'_-2] is also a multiple of alpha1 alpha2^t, with
    factor mu'(kappa1 + kappa2) - mu(kappa1' + kappa2').
    """
    return (commutator_mu(px, py) + py.mu * (px.kappa1 + px.kappa2)
            - px.mu * (py.kappa1 + py.kappa2))


@dataclass
class ClosureReport:
    low_orders_vanish: bool
    admissibility: AdmissibilityReport
    mu_residue_part: bool | None = None
    mu_full: bool | None = None

    @property
    def ok(self) -> bool:
        return self.low_orders_vanish and self.admissibility.ok


def closure_check(x: MatrixJet, y: MatrixJet, d: TyurinDatum) -> ClosureReport:
    if min(x.hi, y.hi) < 3:
        raise ValueError("closure_check needs jets truncated at T >= 3")
    c = jet_commutator(x, y)
    low = c[-4].is_zero() and c[-3].is_zero()
    rep = is_admissible(c.restrict(-2, 1), d)
    out = ClosureReport(low, rep)
    if rep.ok:
        rx, ry = is_admissible(x, d), is_admissible(y, d)
        if rx.ok and ry.ok:
            out.mu_residue_part = commutator_mu(rx.params, ry.params) == rep.params.mu
            out.mu_full = commutator_mu_full(rx.params, ry.params) == rep.params.mu
    return out
