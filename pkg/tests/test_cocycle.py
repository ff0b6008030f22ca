import numpy as np
from oracles import cocycle_density, residue_at
import pytest

from laxg2.cocycle import (NoSolution, OmegaForm, build_omega, certify_holomorphy, cocycle_matrix,
                           cocycle_value, kappa_sum, locality_sweep, locality_window, omega_params,
                           residue_trace_LdL, residue_trace_Lomega)
from laxg2.exact import qzeros
from laxg2.g2 import G2Element
from laxg2.jets import MatrixJet, jet_commutator
from laxg2.sphere import INF, GradingSpec, SurfaceSpec, canonical, element_add, global_bracket, homogeneous_basis
from laxg2.tyurin import NotAdmissible, TyurinDatum, random_admissible

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def fake_omega(m_plus, m_minus):
    return OmegaForm(qzeros(1, 14), (), tuple(m_plus), tuple(m_minus), (0, 0))


def test_locality_window_examples():
    g = GradingSpec((1,), "const:0")
    assert locality_window(g, fake_omega([-2], [2])) == (-1, 1)
    assert locality_window(g, fake_omega([0], [2]))[1] == 0
    assert locality_window(g, fake_omega([-1], [-5]))[1] == 0


@pytest.fixture(scope="module")
def s111():
    spec, g = canonical("111")
    return spec, g, build_omega(spec, 0)


@pytest.fixture(scope="module")
def s112():
    spec, g = canonical("112")
    return spec, g, build_omega(spec, 0)


def test_omega_normalization(s111):
    spec, _, w = s111
    d = spec.tyurin[0]
    p = omega_params(w, d)
    assert p.violations(d) == []
    assert sum(a * b for a, b in zip(d.alpha1, p.beta2)) == 1
    W1a1 = [sum(p.W1[i][j] * d.alpha1[j] for j in range(3)) for i in range(3)]
    assert sum(a * b for a, b in zip(d.alpha2, W1a1)) == 0


def test_omega_seeds_and_json(s111):
    spec, _, w0 = s111
    w1 = build_omega(spec, 1)
    assert w0.budget == w1.budget
    for w in (w0, w1):
        assert omega_params(w, spec.tyurin[0]).violations(spec.tyurin[0]) == []
    # the kernel is nonempty, so different seeds are allowed to differ
    assert w0.to_json() != w1.to_json()
    back = OmegaForm.from_json(w0.to_json())
    assert back.to_json() == w0.to_json()


def test_omega_needs_budget():
    spec, _ = canonical("111")
    with pytest.raises(NoSolution):
        build_omega(spec, 0, max_budget=0)


@pytest.mark.parametrize("seed", range(8))
def test_residue_LdL(seed, s111):
    d = s111[0].tyurin[0]
    x, y = random_admissible(d, 3, 2 * seed), random_admissible(d, 3, 2 * seed + 1)
    assert residue_trace_LdL(x, x, d) == 0
    v = residue_trace_LdL(x, y, d)
    assert v == 2 * kappa_sum(jet_commutator(x, y), d)
    assert residue_trace_LdL(y, x, d) == -v


def test_residue_LdL_rejects_non_admissible(s111):
    d = s111[0].tyurin[0]
    bad = MatrixJet({-2: G2Element(E1, (0, 0, 0), ((0,) * 3,) * 3)}, -2, 3)
    with pytest.raises(NotAdmissible):
        residue_trace_LdL(bad, bad, d)


@pytest.mark.parametrize("seed", range(8))
def test_residue_Lomega(seed, s112):
    spec, _, w = s112
    for s, d in enumerate(spec.tyurin):
        x = random_admissible(d, 3, seed)
        assert residue_trace_Lomega(x, w, spec, s) == 2 * kappa_sum(x, d)
    assert residue_trace_Lomega(MatrixJet({}, -2, 3), w, spec, 0) == 0


def test_residue_Lomega_kappa_instance():
    spec = SurfaceSpec((0,), (INF,), (TyurinDatum(1, E1, E3),))
    w = build_omega(spec, 0)
    x = MatrixJet({0: G2Element((0, 0, 0), (0, 0, 0), ((1, 0, 0), (0, 0, 0), (0, 0, -1)))}, -2, 3)
    assert residue_trace_Lomega(x, w, spec, 0) == 4


def _combo(basis, idx, coefs):
    out = basis[idx[0]].scale(coefs[0])
    for i, c in zip(idx[1:], coefs[1:]):
        out = element_add(out, basis[i].scale(c))
    return out


def test_cocycle_laws(s112):
    spec, g, w = s112
    rng = np.random.default_rng(3)
    bases = {m: homogeneous_basis(spec, g, m) for m in (-1, 0, 1)}
    for _ in range(3):
        x, y, z = (_combo(bases[int(rng.integers(-1, 2))], rng.choice(14, 3, replace=False),
                          [int(c) for c in rng.integers(1, 4, 3)]) for _ in range(3))
        assert certify_holomorphy(x, y, w, spec)
        assert cocycle_value(x, x, w, spec) == 0
        assert cocycle_value(x, y, w, spec) == -cocycle_value(y, x, w, spec)
        cyc = (cocycle_value(global_bracket(x, y), z, w, spec, False)
               + cocycle_value(global_bracket(y, z), x, w, spec, False)
               + cocycle_value(global_bracket(z, x), y, w, spec, False))
        assert cyc == 0
        lhs = cocycle_value(element_add(x, z.scale(-3)), y, w, spec, False)
        assert lhs == cocycle_value(x, y, w, spec, False) - 3 * cocycle_value(z, y, w, spec, False)


def test_fast_path_matches_direct(s112):
    spec, g, w = s112
    G = cocycle_matrix(spec, g, w, -1, 1)
    bm, bn = homogeneous_basis(spec, g, -1), homogeneous_basis(spec, g, 1)
    for i, j in ((0, 0), (3, 7), (13, 2), (8, 11)):
        assert G[i, j] == cocycle_value(bm[i], bn[j], w, spec, False)


def test_locality_sweep_small(s111):
    spec, g, w = s111
    r = locality_sweep(spec, g, w, 2)
    assert r.ok
    assert any(r.nonzero.values())


def test_corrected_window():
    g = GradingSpec((1,), "const:0")
    # the two bounds differ only when max m^- < 1
    assert locality_window(g, fake_omega([0], [2])) == locality_window(g, fake_omega([0], [2]), True)
    assert locality_window(g, fake_omega([0], [0])) == (1, 0)
    assert locality_window(g, fake_omega([0], [0]), True) == (0, 0)


def test_displayed_window_misses_degree_zero(s112):
    spec, g, w = s112
    assert not locality_sweep(spec, g, w, 1).ok
    assert locality_sweep(spec, g, w, 1, corrected=True).ok


@pytest.mark.parametrize("pair", [(0, 3), (2, 5), (4, 9)])
def test_cocycle_against_sympy_residues(pair, s112):
    spec, g, w = s112
    bm, bn = homogeneous_basis(spec, g, -1), homogeneous_basis(spec, g, 1)
    x, y = bm[pair[0]], bn[pair[1]]
    f = cocycle_density(x, y, w.phi)
    for d in spec.tyurin:
        assert residue_at(f, d.gamma) == 0
    rp = sum(residue_at(f, p) for p in spec.p_points)
    assert rp == cocycle_value(x, y, w, spec)
    assert rp + residue_at(f, INF) == 0
