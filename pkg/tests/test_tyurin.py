import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from laxg2.g2 import DIM, G2Element, bracket
from laxg2.jets import MatrixJet, jet_commutator
from laxg2.tyurin import (GENERIC_RELATIONS, DegenerateDatum, NotAdmissible, TyurinDatum,
                          admissible_jet_basis, annihilator, check_order_minus2, check_order_one,
                          check_order_zero, check_residue, closure_check, commutator_mu,
                          commutator_mu_full, effective_relation_count, extract_params, is_admissible,
                          random_admissible, random_datum)

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
Z3 = (0, 0, 0)
Z33 = (Z3, Z3, Z3)
D12 = TyurinDatum(0, E1, E2)
GENERIC = [TyurinDatum(0, E1, E2), TyurinDatum(1, (1, 1, 0), (1, -1, 1)),
           TyurinDatum(2, (1, 0, 2), (2, 1, -1))] + [random_datum(np.random.default_rng(s)) for s in range(3)]


def outer(x, y):
    return tuple(tuple(a * b for b in y) for a in x)


def sym_codims(d):
    """Codimension of each admissible coefficient space, from the defining equations in sympy."""
    a1, a2 = sympy.Matrix(d.alpha1), sympy.Matrix(d.alpha2)
    c = sympy.symbols("c0:14")
    v1, v2 = sympy.Matrix(c[0:3]), sympy.Matrix(c[3:6])
    h1, h2, x01, x02, x10, x12, x20, x21 = c[6:]
    A = sympy.Matrix([[h1, x01, x02], [x10, h2 - h1, x12], [x20, x21, -h2]])

    def codim(eqs):
        return sympy.Matrix(eqs).jacobian(c).rank()

    # order -2: a1 = a2 = 0 and A parallel to alpha1 alpha2^t
    T = a1 * a2.T
    minus2 = list(v1) + list(v2) + [A[i, j] * T[k, l] - A[k, l] * T[i, j]
                                    for i in range(3) for j in range(3) for k in range(3) for l in range(3)]
    # residue: a1 || alpha1, a2 || alpha2, A = alpha1 b2^t - b1 alpha2^t with alpha1.b2 = alpha2.b1 = 0.
    # The admissible A form the image of the 4-dim space of such (b1, b2); encode as orthogonal complement.
    b = sympy.symbols("b0:6")
    b1, b2 = sympy.Matrix(b[0:3]), sympy.Matrix(b[3:6])
    img = a1 * b2.T - b1 * a2.T
    cons = sympy.Matrix([a1.dot(b2), a2.dot(b1)])
    par = cons.jacobian(b).nullspace()
    span = sympy.Matrix([[img.subs(dict(zip(b, p))).reshape(9, 1)[k] for k in range(9)] for p in par])
    perp = span.nullspace()
    flatA = sympy.Matrix(list(A)).T
    resid = [v1.cross(a1)[k] for k in range(3)] + [v2.cross(a2)[k] for k in range(3)] + [(flatA * p)[0] for p in perp]
    # eigen: alpha1.a2 = alpha2.a1 = 0, A alpha1 || alpha1, A^t alpha2 || alpha2
    eigen = [a1.dot(v2), a2.dot(v1)] + list((A * a1).cross(a1)) + list((A.T * a2).cross(a2))
    first = [(a2.T * A * a1)[0]]
    return codim(resid), codim(minus2), codim(eigen), codim(first)


def test_datum_validation():
    with pytest.raises(DegenerateDatum):
        TyurinDatum(0, E1, (1, 1, 0))
    with pytest.raises(DegenerateDatum):
        TyurinDatum(0, Z3, E2)
    assert TyurinDatum.from_json(D12.to_json()) == D12


def test_check_order_minus2():
    assert check_order_minus2(G2Element(Z3, Z3, tuple(tuple(5 * v for v in r) for r in outer(E1, E2))), D12) == 5
    assert check_order_minus2(G2Element.zero(), D12) == 0
    with pytest.raises(NotAdmissible):
        check_order_minus2(G2Element(Z3, Z3, outer(E2, E1)), D12)


def test_check_residue():
    assert check_residue(G2Element(E1, Z3, Z33), D12) == (1, 0, Z3, Z3)
    assert check_residue(G2Element.zero(), D12) == (0, 0, Z3, Z3)
    assert check_residue(G2Element(Z3, Z3, outer(E1, E3)), D12) == (0, 0, Z3, E3)
    with pytest.raises(NotAdmissible):
        check_residue(G2Element(E2, Z3, Z33), D12)


def test_check_order_zero():
    d = TyurinDatum(0, E1, E3)
    A = ((1, 0, 0), (0, 0, 0), (0, 0, -1))
    assert check_order_zero(G2Element(Z3, Z3, A), d) == (1, 1, 0, 0)
    assert check_order_zero(G2Element.zero(), d) == (0, 0, 0, 0)
    with pytest.raises(NotAdmissible):
        check_order_zero(G2Element(Z3, Z3, outer(E2, E1)), d)


def test_check_order_one():
    assert check_order_one(G2Element(Z3, Z3, outer(E1, E2)), D12)
    assert check_order_one(G2Element.zero(), D12)
    with pytest.raises(NotAdmissible):
        check_order_one(G2Element(Z3, Z3, outer(E2, E1)), D12)


def test_is_admissible_composition():
    rep = is_admissible(MatrixJet({}, -2, 3), D12)
    assert rep.ok and not any(rep.params.vector())
    good = MatrixJet({-2: G2Element(Z3, Z3, outer(E1, E2)), -1: G2Element(Z3, Z3, outer(E1, E3)),
                      0: G2Element(Z3, Z3, ((1, 0, 0), (0, 0, 0), (0, 0, -1))),
                      1: G2Element(Z3, Z3, outer(E1, E2))}, -2, 3)
    rep = is_admissible(good, D12)
    assert rep.ok and rep.params.mu == 1 and rep.params.beta2 == E3
    bad = MatrixJet({**good.coeffs, 1: G2Element(Z3, Z3, outer(E2, E1))}, -2, 3)
    rep = is_admissible(bad, D12)
    assert rep.failed() == ["first_order"]
    with pytest.raises(NotAdmissible):
        extract_params(bad, D12)


def test_jet_basis_dimensions():
    for T in (1, 2, 3):
        basis = admissible_jet_basis(D12, T)
        assert len(basis) == 14 * (T + 3) - GENERIC_RELATIONS
    assert all(is_admissible(j, D12).ok for j in admissible_jet_basis(D12, 3))
    assert annihilator(D12).shape == (28, 56)


@pytest.mark.parametrize("d", GENERIC, ids=lambda d: "-".join(map(str, d.alpha1 + d.alpha2)))
def test_relation_count_matches_sympy_oracle(d):
    rc = effective_relation_count(d)
    assert (rc.residue, rc.order_minus2, rc.eigen, rc.first_order) == sym_codims(d)
    # measured breakdown; see the ledger for why it differs from (8, 13, 6, 1)
    assert (rc.residue, rc.order_minus2, rc.eigen, rc.first_order) == (9, 13, 5, 1)
    assert rc.total == 28 == 2 * DIM


def test_random_admissible():
    a, b = random_admissible(D12, 3, seed=1), random_admissible(D12, 3, seed=1)
    assert a == b
    assert a != random_admissible(D12, 3, seed=2)
    assert is_admissible(a, D12).ok


@pytest.mark.parametrize("d", GENERIC[:3], ids=str)
def test_closure(d):
    j = random_admissible(d, 3, seed=5)
    assert closure_check(j, j, d).ok
    for s in range(10):
        x, y = random_admissible(d, 3, seed=2 * s), random_admissible(d, 3, seed=2 * s + 1)
        r = closure_check(x, y, d)
        c = jet_commutator(x, y)
        assert r.ok and c[-4].is_zero() and c[-3].is_zero()
        assert r.mu_full


def test_closure_negative_control():
    d = GENERIC[1]
    x, y = random_admissible(d, 3, seed=3), random_admissible(d, 3, seed=4)
    bad_x = MatrixJet({**x.coeffs, 1: x[1] + G2Element(Z3, Z3, outer(d.alpha2, d.alpha1))}, -2, 3)
    assert not is_admissible(bad_x, d).ok
    r = closure_check(bad_x, y, d)
    # a non-admissible input never gets a mu verdict
    assert r.mu_residue_part is None and r.mu_full is None


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_mu_formulas(s1, s2):
    d = GENERIC[2]
    x, y = random_admissible(d, 3, seed=s1), random_admissible(d, 3, seed=s2)
    px, py = extract_params(x, d), extract_params(y, d)
    assert commutator_mu(px, px) == 0
    assert commutator_mu(px, py) == -commutator_mu(py, px)
    # the closed form is mu of the residue-residue bracket
    assert commutator_mu(px, py) == check_order_minus2(bracket(x[-1], y[-1]), d)
    # the whole order -2 coefficient also picks up the kappa terms
    assert commutator_mu_full(px, py) == check_order_minus2(jet_commutator(x, y)[-2], d)


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(-4, 4))
def test_params_linear(s1, s2, c):
    d = GENERIC[1]
    x, y = random_admissible(d, 3, seed=s1), random_admissible(d, 3, seed=s2)
    pz = extract_params(x + y.scale(c), d).vector()
    px, py = extract_params(x, d).vector(), extract_params(y, d).vector()
    assert pz == tuple(a + c * b for a, b in zip(px, py))
