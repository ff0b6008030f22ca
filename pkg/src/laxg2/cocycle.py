"""The one-form omega, the residue lemmas and the cocycle
gamma(L, L') = sum over P of res tr(L dL' - omega [L, L']).

omega = Phi(z) dz with Phi a g2-valued rational function, simple poles at the
Tyurin points and poles of bounded order at P- and Q-points.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import (ONE, ZERO, Inconsistent, Q, affine_system, fmt, qarray, qzeros,
                    solve_affine)
from .g2 import DIM, G2Element, dot, gram, mvec, structure_constants, trace_form, transpose, vscale, vsub
from .jets import (MatrixJet, jet_commutator, jet_derivative, jet_product, residue, trace_jet)
from .sphere import (INF, GlobalElement, SurfaceSpec, GradingSpec, _den_tuple, _homogeneous_coeffs,
                     expand_at, laurent, DegenerateConfiguration)
from .tyurin import (NotAdmissible, TyurinDatum, _solve_residue_matrix, check_order_zero,
                     extract_params, residue_matrix)


class NoSolution(ArithmeticError):
    pass


class HolomorphyViolation(ArithmeticError):
    pass


# -- omega ---------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaParams:
    beta01: object
    beta02: object
    beta1: tuple
    beta2: tuple
    w1: tuple
    w2: tuple
    W: tuple
    kappa1: object
    kappa2: object
    W1: tuple

    def violations(self, d: TyurinDatum) -> list:
        a1, a2 = d.alpha1, d.alpha2
        out = []
        if dot(a1, self.beta2) != 1:
            out.append("alpha1.beta2~ != 1")
        if dot(a2, self.beta1) != 1:
            out.append("alpha2.beta1~ != 1")
        if dot(a1, self.w2) != 0 or dot(a2, self.w1) != 0:
            out.append("w-slots not orthogonal")
        if mvec(self.W, a1) != vscale(self.kappa1, a1):
            out.append("W alpha1 != kappa1~ alpha1")
        if vscale(-1, mvec(transpose(self.W), a2)) != vscale(self.kappa2, a2):
            out.append("-W^t alpha2 != kappa2~ alpha2")
        if dot(a2, mvec(self.W1, a1)) != 0:
            out.append("alpha2^t W1 alpha1 != 0")
        return out

    def to_json(self) -> dict:
        v = lambda x: [fmt(t) for t in x]
        return {"beta01": fmt(self.beta01), "beta02": fmt(self.beta02), "beta1": v(self.beta1),
                "beta2": v(self.beta2), "w1": v(self.w1), "w2": v(self.w2),
                "W": [v(r) for r in self.W], "kappa1": fmt(self.kappa1), "kappa2": fmt(self.kappa2),
                "W1": [v(r) for r in self.W1]}


@dataclass(frozen=True, eq=False)
class OmegaForm:
    """omega = numerator(z) / den(z) dz."""
    numerator: np.ndarray
    den: tuple
    m_plus: tuple        # ord of omega at each P
    m_minus: tuple       # minus ord of omega at each Q
    budget: tuple        # (pole order allowed at P, at Q)
    seed: int = 0

    @property
    def phi(self) -> GlobalElement:
        return GlobalElement(self.numerator, self.den)

    def jet_at(self, location, T: int = 3) -> MatrixJet:
        return expand_at(self.phi, location, T, lo=None)

    def to_json(self) -> dict:
        return {"numerator": [[fmt(v) for v in row] for row in self.numerator],
                "den": [[fmt(c), e] for c, e in self.den], "m_plus": list(self.m_plus),
                "m_minus": list(self.m_minus), "budget": list(self.budget), "seed": self.seed}

    @classmethod
    def from_json(cls, d) -> "OmegaForm":
        num = qarray([[Q(v) for v in row] for row in d["numerator"]]).reshape(-1, DIM)
        return cls(num, tuple((Q(c), int(e)) for c, e in d["den"]), tuple(d["m_plus"]),
                   tuple(d["m_minus"]), tuple(d["budget"]), int(d.get("seed", 0)))


def omega_params(w: OmegaForm, d: TyurinDatum) -> OmegaParams:
    j = w.jet_at(d.gamma, 1)
    if any(not j[n].is_zero() for n in range(j.lo, -1)):
        raise NotAdmissible(-2, "omega pole order", "omega must have a simple pole at a Tyurin point")
    r, c0, c1 = j[-1], j[0], j[1]
    b01 = _ratio(r.a1, d.alpha1)
    b02 = _ratio(r.a2, d.alpha2)
    if b01 is None or b02 is None:
        raise NotAdmissible(-1, "omega residue shape")
    try:
        b1, b2 = _solve_residue_matrix(r.A, d)
    except Inconsistent:
        raise NotAdmissible(-1, "omega residue shape") from None
    k1 = _ratio(mvec(c0.A, d.alpha1), d.alpha1)
    k2 = _ratio(vscale(-1, mvec(transpose(c0.A), d.alpha2)), d.alpha2)
    if k1 is None or k2 is None:
        raise NotAdmissible(0, "omega eigen")
    return OmegaParams(b01, b02, b1, b2, c0.a1, c0.a2, c0.A, k1, k2, c1.A)


def _ratio(v, a):
    k = next(i for i in range(3) if a[i])
    c = v[k] / a[k]
    return c if all(v[i] == c * a[i] for i in range(3)) else None


def _omega_den(spec: SurfaceSpec, eP: int, eQ: int):
    den = {g: 1 for g in spec.gammas}
    for p in spec.p_points:
        if eP:
            den[p] = eP
    for q in spec.q_points:
        if q != INF and eQ:
            den[q] = eQ
    deg_den = sum(den.values())
    top = deg_den + (eQ if INF in spec.q_points else 0) - 2
    return den, top


def _omega_system(spec: SurfaceSpec, den: dict, top: int):
    length = top + 1
    n_num = DIM * length
    K = spec.K
    # scalar Laurent data of z^i / den at each gamma, orders -1..1
    mono = []
    for d in spec.tyurin:
        rows = []
        for i in range(length):
            e = [ZERO] * (i + 1)
            e[i] = ONE
            rows.append(laurent(e, den, d.gamma, -1, 1))
        mono.append(rows)

    def resid(u):
        X = np.asarray(u[:n_num], dtype=object).reshape(length, DIM)
        out = []
        for s, d in enumerate(spec.tyurin):
            aux = u[n_num + 10 * s: n_num + 10 * (s + 1)]
            b01, b02, b1, b2, k1, k2 = aux[0], aux[1], tuple(aux[2:5]), tuple(aux[5:8]), aux[8], aux[9]
            co = {n: sum((mono[s][i][n] * X[i] for i in range(length) if mono[s][i][n]), qzeros(DIM))
                  for n in (-1, 0, 1)}
            r, c0, c1 = (G2Element.from_coords(co[n]) for n in (-1, 0, 1))
            a1, a2 = d.alpha1, d.alpha2
            out += list(vsub(r.a1, vscale(b01, a1))) + list(vsub(r.a2, vscale(b02, a2)))
            M = residue_matrix(d, b1, b2)
            out += [r.A[i][j] - M[i][j] for i in range(3) for j in range(3)]
            out += [dot(a1, b2) - 1, dot(a2, b1) - 1]
            out += [dot(a1, c0.a2), dot(a2, c0.a1)]
            out += list(vsub(mvec(c0.A, a1), vscale(k1, a1)))
            out += list(vsub(vscale(-1, mvec(transpose(c0.A), a2)), vscale(k2, a2)))
            out += [dot(a2, mvec(c1.A, a1))]
        return out

    return affine_system(resid, n_num + 10 * K), n_num, length


def _orders(w_num, den: dict, spec: SurfaceSpec):
    phi = GlobalElement(w_num, _den_tuple(den))
    m_plus = []
    for p in spec.p_points:
        j = expand_at(phi, p, 2)
        low = j.lowest_order()
        m_plus.append(int(low) if low is not None else 2)
    m_minus = []
    for q in spec.q_points:
        j = expand_at(phi, q, 2)
        low = j.lowest_order()
        o = low if low is not None else 2
        if q == INF:
            o -= 2          # dz = -dw / w^2
        m_minus.append(int(-o))
    return tuple(m_plus), tuple(m_minus)


def build_omega(spec: SurfaceSpec, seed: int = 0, max_budget: int = 6) -> OmegaForm:
    """Smallest total pole budget at P and Q for which omega exists; kernel freedom drawn from seed."""
    if spec.K == 0:
        raise DegenerateConfiguration("omega needs at least one Tyurin point")
    rng = np.random.default_rng(seed)
    for total in range(max_budget + 1):
        for eP in range(total + 1):
            eQ = total - eP
            den, top = _omega_den(spec, eP, eQ)
            if top < 0:
                continue
            system, n_num, length = _omega_system(spec, den, top)
            try:
                sol = solve_affine(system)
            except Inconsistent:
                continue
            x = sol.particular.copy()
            for v in sol.kernel:
                c = int(rng.integers(-2, 3))
                if c:
                    x = x + c * v
            num = np.asarray(x[:n_num], dtype=object).reshape(length, DIM)
            m_plus, m_minus = _orders(num, den, spec)
            return OmegaForm(num, _den_tuple(den), m_plus, m_minus, (eP, eQ), seed)
    raise NoSolution(f"no omega with pole budget up to {max_budget}")


# -- residue lemmas -------------------------------------------------------------

def _require(x: MatrixJet, d: TyurinDatum | None):
    if d is None:
        return
    extract_params(x, d)  # raises NotAdmissible naming the failing order


def trace_LdL(x: MatrixJet, y: MatrixJet):
    """Scalar jet of tr(L dL')."""
    return trace_jet(jet_product(x, jet_derivative(y)))


def residue_trace_LdL(x: MatrixJet, y: MatrixJet, d: TyurinDatum | None = None):
    """res tr(L dL') at a Tyurin point; certifies that orders -5..-2 vanish."""
    if min(x.hi, y.hi) < 2:
        raise ValueError("need jets truncated at T >= 2")
    _require(x, d)
    _require(y, d)
    s = trace_LdL(x, y)
    bad = [n for n in range(s.lo, -1) if s[n] != 0]
    if bad:
        raise HolomorphyViolation(f"tr(L dL') has nonzero coefficients at orders {bad}")
    value = residue(s)
    closed = (2 * trace_form(x[-2], y[2]) + trace_form(x[-1], y[1])
              - trace_form(x[1], y[-1]) - 2 * trace_form(x[2], y[-2]))
    if closed != value:
        raise ArithmeticError("closed-form residue disagrees with the jet product")
    return value


def residue_trace_Lomega(x: MatrixJet, w: OmegaForm, spec: SurfaceSpec, gamma_index: int,
                         check: bool = True):
    """res tr(L omega) at the given Tyurin point; certifies that orders -3, -2 vanish."""
    d = spec.tyurin[gamma_index]
    if check:
        _require(x, d)
    wj = w.jet_at(d.gamma, max(x.hi, 2))
    s = trace_jet(jet_product(x, wj))
    bad = [n for n in range(s.lo, -1) if s[n] != 0]
    if bad:
        raise HolomorphyViolation(f"tr(L omega) has nonzero coefficients at orders {bad}")
    value = residue(s)
    closed = trace_form(x[-2], wj[1]) + trace_form(x[-1], wj[0]) + trace_form(x[0], wj[-1])
    if closed != value:
        raise ArithmeticError("closed-form residue disagrees with the jet product")
    return value


def kappa_sum(x: MatrixJet, d: TyurinDatum):
    k1, k2, _, _ = check_order_zero(x[0], d)
    return k1 + k2


# -- the cocycle --------------------------------------------------------------------

def _window_low(L: GlobalElement, loc) -> int:
    if loc == INF:
        return -2
    return -L.den_factors.get(loc, 0)


def integrand_jet(x: GlobalElement, y: GlobalElement, w: OmegaForm, loc, hi: int = 0):
    """Scalar jet of tr(x dy - Phi [x, y]) (coefficient of dz) at a finite point, orders up to hi."""
    lx, ly, lw = (min(_window_low(e, loc), -2) for e in (x, y, w.phi))
    T = hi + 2 - lx - ly - lw
    jx = expand_at(x, loc, T, lo=lx)
    jy = expand_at(y, loc, T, lo=ly)
    jw = expand_at(w.phi, loc, T, lo=lw)
    a = trace_LdL(jx, jy)
    b = trace_jet(jet_product(jw, jet_commutator(jx, jy)))
    return a - b


def certify_holomorphy(x: GlobalElement, y: GlobalElement, w: OmegaForm, spec: SurfaceSpec) -> bool:
    """Every coefficient of negative order of tr(x dy - omega [x, y]) vanishes at every Tyurin point."""
    for d in spec.tyurin:
        s = integrand_jet(x, y, w, d.gamma, 0)
        bad = [n for n in range(s.lo, 0) if s[n] != 0]
        if bad:
            raise HolomorphyViolation(f"orders {bad} at gamma = {fmt(d.gamma)}")
    return True


def cocycle_value(x: GlobalElement, y: GlobalElement, w: OmegaForm, spec: SurfaceSpec,
                  certify: bool = True):
    if certify:
        certify_holomorphy(x, y, w, spec)
    total = ZERO
    for p in spec.p_points:
        total += residue(integrand_jet(x, y, w, p, -1))
    return total


# fast path: the cocycle as a bilinear form on coefficient vectors

def _series(num, den: dict, loc, lo: int, hi: int) -> list:
    co = laurent(list(num), den, loc, lo, hi)
    return [co[n] for n in range(lo, hi + 1)]


def _scalar_residues(space_x, space_y, w: OmegaForm, spec: SurfaceSpec):
    """R1[k, l] = sum_P res f_k g_l', R2[r, k, l] = sum_P res phi_r f_k g_l."""
    fx, fy = [list(v) for v in space_x.basis], [list(v) for v in space_y.basis]
    dx, dy, dw = dict(space_x.den), dict(space_y.den), dict(w.den)
    nx, ny = len(fx), len(fy)
    R1 = qzeros(nx, ny)
    R2 = qzeros(DIM, nx, ny)
    wrows = [w.numerator[:, r] for r in range(DIM)]
    for p in spec.p_points:
        lx, ly, lw = -dx.get(p, 0), -dy.get(p, 0), -dw.get(p, 0)
        span = 2 - lx - ly - lw
        sx = [_series(f, dx, p, lx, lx + span) for f in fx]
        sy = [_series(g, dy, p, ly, ly + span) for g in fy]
        sw = [_series(list(col), dw, p, lw, lw + span) for col in wrows]
        # derivative of g: order ly + k -> ly + k - 1 with factor ly + k
        dsy = [[(ly + k) * v for k, v in enumerate(s)] for s in sy]
        for k in range(nx):
            for l in range(ny):
                # res f g' : sum over i + j = -1 with i = lx + a, j = ly - 1 + b
                acc = ZERO
                for a, fa in enumerate(sx[k]):
                    if fa:
                        b = -1 - (lx + a) - (ly - 1)
                        if 0 <= b < len(dsy[l]):
                            acc += fa * dsy[l][b]
                R1[k, l] += acc
        for k in range(nx):
            for l in range(ny):
                # product f g as a series from lx + ly
                fg = [ZERO] * (len(sx[k]) + len(sy[l]) - 1)
                for a, fa in enumerate(sx[k]):
                    if fa:
                        for b, gb in enumerate(sy[l]):
                            if gb:
                                fg[a + b] += fa * gb
                for r in range(DIM):
                    acc = ZERO
                    for c, wc in enumerate(sw[r]):
                        if wc:
                            e = -1 - (lw + c) - (lx + ly)
                            if 0 <= e < len(fg):
                                acc += wc * fg[e]
                    R2[r, k, l] += acc
    return R1, R2


@lru_cache(maxsize=1)
def _bracket_pairing():
    """Mt[r, p, q] = tr(e_r [e_p, e_q])."""
    C, K = structure_constants(), gram()
    return np.tensordot(K, C, axes=([1], [2]))


def cocycle_matrix(spec: SurfaceSpec, gspec: GradingSpec, w: OmegaForm, m: int, n: int) -> np.ndarray:
    """G[i, j] = gamma(e_i, f_j) for the bases of L_m and L_n."""
    sx, cx = _homogeneous_coeffs(spec, gspec, m)
    sy, cy = _homogeneous_coeffs(spec, gspec, n)
    R1, R2 = _scalar_residues(sx, sy, w, spec)
    K = gram()
    Mt = _bracket_pairing()
    nx, ny = len(sx.basis), len(sy.basis)
    big = np.kron(R1, K)
    for r in range(DIM):
        if any(R2[r].flat):
            big = big - np.kron(R2[r], Mt[r])
    X = qarray([list(v) for v in cx]).reshape(-1, DIM * nx)
    Y = qarray([list(v) for v in cy]).reshape(-1, DIM * ny)
    return X.dot(big).dot(Y.T)


def locality_window(gspec: GradingSpec, w: OmegaForm, corrected: bool = False) -> tuple:
    """(lower, upper): gamma(L_m, L_n) can be nonzero only for lower <= m + n <= upper.

    The default is the displayed bound, which takes the pole order of L dL' at
    Q_j to be n + n' - 1.  d raises a pole order by one, so it is really
    n + n' + 1; corrected=True uses that and gives 2B + 1 in place of 2B - 1.
    The two agree whenever max m_j^- >= 1.
    """
    B = gspec.bound
    shift = 1 if corrected else -1
    upper = -1 - min(-1, min(w.m_plus))
    lower = min((1 - max(2 * B + shift, 2 * B + max(w.m_minus))) / aj for aj in gspec.a)
    return lower, upper


@dataclass
class SweepResult:
    window: tuple
    nonzero: dict        # (m, n) -> number of nonzero entries
    violations: list     # (m, n) outside the window with a nonzero entry

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"window": [fmt(Q(self.window[0])), int(self.window[1])],
                "nonzero": {f"{m},{n}": c for (m, n), c in sorted(self.nonzero.items())},
                "violations": [list(v) for v in self.violations]}


def locality_sweep(spec, gspec, w: OmegaForm, mmax: int = 4, corrected: bool = False) -> SweepResult:
    lower, upper = locality_window(gspec, w, corrected)
    nonzero, bad = {}, []
    for m in range(-mmax, mmax + 1):
        for n in range(-mmax, mmax + 1):
            G = cocycle_matrix(spec, gspec, w, m, n)
            c = sum(1 for v in G.flat if v)
            nonzero[(m, n)] = c
            if c and not lower <= m + n <= upper:
                bad.append((m, n))
    return SweepResult((lower, upper), nonzero, bad)
