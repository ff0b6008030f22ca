"""Acceptance criteria 1-10, exact arithmetic throughout.

Each test records one pass/fail line, printed at the end of the run.
"""
import json

import numpy as np
import pytest

from laxg2.cli import main
from laxg2.cocycle import (HolomorphyViolation, build_omega, cocycle_value, kappa_sum, locality_sweep,
                           residue_trace_Lomega, residue_trace_LdL)
from laxg2.config import default_config
from laxg2.g2 import (DIM, block_identity, bracket, embed, project, random_element, random_vector,
                      relation_checks)
from laxg2.jets import jet_commutator
from laxg2.sphere import (CANONICAL, COMPANIONS, canonical, dim_homogeneous, element_add, global_bracket,
                          grading_check, homogeneous_basis, joint_rank)
from laxg2.tyurin import (TyurinDatum, admissible_jet_basis, closure_check, effective_relation_count,
                          random_admissible_rng, random_datum)

pytestmark = pytest.mark.acceptance

DATA = [TyurinDatum(0, (1, 0, 0), (0, 1, 0)), TyurinDatum(1, (1, 1, 0), (1, -1, 1)),
        TyurinDatum(2, (1, 0, 2), (2, 1, -1))] + [random_datum(np.random.default_rng(100 + s)) for s in range(2)]


def tally(outcomes):
    outcomes = list(outcomes)
    return sum(outcomes), len(outcomes)


def test_criterion_01_g2_closure(criterion):
    r = np.random.default_rng(1)
    n = 200
    triples = [(random_element(r), random_element(r), random_element(r)) for _ in range(n)]
    rels = [relation_checks(random_vector(r), random_vector(r), random_element(r).A) for _ in range(n)]
    parts = {
        "relations": tally(all(x.values()) for x in rels),
        "block identity": tally(block_identity(x, y) for x, y, _ in triples),
        "7x7 oracle": tally(project(embed(x) @ embed(y) - embed(y) @ embed(x)) == bracket(x, y)
                            for x, y, _ in triples),
        "Jacobi": tally((bracket(x, bracket(y, z)) + bracket(y, bracket(z, x))
                         + bracket(z, bracket(x, y))).is_zero() for x, y, z in triples),
    }
    ok = all(a == b for a, b in parts.values())
    assert criterion(1, "G2 closure", ok, ", ".join(f"{k} {a}/{b}" for k, (a, b) in parts.items()))


def test_criterion_02_relation_count(criterion):
    counts = [effective_relation_count(d) for d in DATA]
    got = {(c.residue, c.order_minus2, c.eigen, c.first_order) for c in counts}
    totals = {c.total for c in counts}
    ok = got == {(8, 13, 6, 1)} and totals == {2 * DIM}
    detail = f"expected (8,13,6,1) total 28 on {len(DATA)} data; got {sorted(got)} total {sorted(totals)}"
    criterion(2, "relation breakdown", ok, detail)
    assert totals == {2 * DIM}
    assert got == {(8, 13, 6, 1)}


def test_criterion_03_jet_space_dimensions(criterion):
    dims = {T: {len(admissible_jet_basis(d, T)) for d in DATA} for T in (1, 3)}
    ok = dims == {1: {28}, 3: {56}}
    assert criterion(3, "admissible jet space dimensions", ok, f"T=1 {sorted(dims[1])}, T=3 {sorted(dims[3])}")


def test_criterion_04_commutator_closure(criterion):
    r = np.random.default_rng(4)
    closed = low = mu_b2 = mu_full = n = 0
    for d in DATA:
        for _ in range(50):
            x, y = random_admissible_rng(d, 3, r), random_admissible_rng(d, 3, r)
            rep = closure_check(x, y, d)
            n += 1
            closed += rep.ok
            low += rep.low_orders_vanish
            mu_b2 += bool(rep.mu_residue_part)
            mu_full += bool(rep.mu_full)
    ok = closed == low == mu_b2 == n
    detail = (f"orders -4,-3 vanish {low}/{n}, commutator admissible {closed}/{n}, "
              f"mu = closed residue formula {mu_b2}/{n} (with kappa terms {mu_full}/{n})")
    criterion(4, "closure of admissible jets", ok, detail)
    assert low == n and closed == n
    assert mu_b2 == n


def test_criterion_05_dimensions(criterion):
    bad, info = [], []
    for name in CANONICAL:
        spec, g = canonical(name)
        dims = {dim_homogeneous(spec, g, m) for m in range(-3, 4)}
        if dims != {DIM * spec.N}:
            bad.append(f"{name}: {sorted(dims)} vs {DIM * spec.N}")
    for name in COMPANIONS:
        spec, g = canonical(name)
        info.append(f"{name} {sorted({dim_homogeneous(spec, g, m) for m in range(-3, 4)})}")
    detail = ("all 14N" if not bad else "; ".join(bad)) + f" [companions {', '.join(info)}]"
    assert criterion(5, "dim L_m = 14N for m in [-3, 3]", not bad, detail)


def _spreads(name, lo=-3, hi=3):
    spec, g = canonical(name)
    return {(k, l): grading_check(spec, g, k, l).spread for k in range(lo, hi + 1) for l in range(k, hi + 1)}


def test_criterion_06_almost_graded(criterion):
    parts, ok = [], True
    for name in CANONICAL:
        spec, g = canonical(name)
        r, n = joint_rank(spec, g, (-3, 3))
        ok &= r == n
        parts.append(f"{name} rank {r}/{n}")
    for name in CANONICAL:
        spec, _ = canonical(name)
        sp = _spreads(name)
        vals = sorted({-1 if v is None else v for v in sp.values()})
        if spec.N == 1 and spec.M == 1:
            ok &= vals == [0]
            parts.append(f"{name} spreads {vals}")
        else:
            parts.append(f"{name} spreads measured {vals} (-1 = outside every window)")
    for name in COMPANIONS:
        spec, g = canonical(name)
        r, n = joint_rank(spec, g, (-3, 3))
        parts.append(f"companion {name} rank {r}/{n}")
    assert criterion(6, "joint independence and spread", ok, "; ".join(parts))


def _kappas(M, d):
    """(kappa1, kappa2) of a 7x7 product: eigenvalues of its (2,2) block on alpha1 and (3,3) block on alpha2."""
    assert not M.irr[1:4, 1:4].any() and not M.irr[4:7, 4:7].any()
    out = []
    for blk, a in ((M.rat[1:4, 1:4], d.alpha1), (M.rat[4:7, 4:7], d.alpha2)):
        v = blk.dot(np.array(a, dtype=object))
        i = next(k for k in range(3) if a[k])
        k = v[i] / a[i]
        if any(v[j] != k * a[j] for j in range(3)):
            return None
        out.append(k)
    return tuple(out)


def _intermediate_facts(x, y, d):
    P = lambda i, j: embed(x[i]) @ embed(y[j])
    Pr = lambda i, j: embed(y[j]) @ embed(x[i])
    facts = []
    k0 = _kappas(P(0, 0) - Pr(0, 0), d)
    facts.append(k0 is not None and sum(k0) == 0)
    k = _kappas(P(-1, 1), d)
    facts.append(k is not None and P(-1, 1).trace() == 2 * sum(k))
    facts.append(_kappas(P(1, -1), d) == (0, 0))
    s = P(-2, 2) + P(2, -2)
    ks, kr = _kappas(s, d), _kappas(Pr(2, -2) + Pr(-2, 2), d)
    facts.append(ks is not None and ks[0] == ks[1])
    t = (P(-2, 2) - P(2, -2)).trace()
    facts.append(kr is not None and 2 * t == 2 * (sum(ks) - sum(kr)))
    return all(facts)


def test_criterion_07_residue_LdL(criterion):
    r = np.random.default_rng(7)
    lemma = inter = n = 0
    for d in DATA:
        for _ in range(10):
            x, y = random_admissible_rng(d, 3, r), random_admissible_rng(d, 3, r)
            n += 1
            try:
                lemma += residue_trace_LdL(x, y, d) == 2 * kappa_sum(jet_commutator(x, y), d)
            except HolomorphyViolation:
                pass
            inter += _intermediate_facts(x, y, d)
    ok = lemma == inter == n
    assert criterion(7, "res tr(L dL') = 2(kappa1+kappa2)([L,L'])", ok,
                     f"lemma {lemma}/{n} (orders below -1 vanish), intermediate facts {inter}/{n}")


def test_criterion_08_residue_Lomega(criterion):
    r = np.random.default_rng(8)
    good = n = 0
    for name in CANONICAL:
        spec, _ = canonical(name)
        w = build_omega(spec, 0)
        for _ in range(50 // len(CANONICAL) + 1):
            s = int(r.integers(0, spec.K))
            d = spec.tyurin[s]
            x = random_admissible_rng(d, 3, r)
            n += 1
            good += residue_trace_Lomega(x, w, spec, s) == 2 * kappa_sum(x, d)
    assert criterion(8, "res tr(L omega) = 2(kappa1+kappa2)(L)", good == n, f"{good}/{n} jets over {list(CANONICAL)}")


def _combo(r, basis):
    idx = r.choice(len(basis), size=3, replace=False)
    out = None
    for i in sorted(int(j) for j in idx):
        e = basis[i].scale(int(r.integers(1, 4)))
        out = e if out is None else element_add(out, e)
    return out


def test_criterion_09_cocycle(criterion):
    r = np.random.default_rng(9)
    holo = laws = n = 0
    local, corrected = [], []
    for name in CANONICAL:
        spec, g = canonical(name)
        w = build_omega(spec, 0)
        bases = {m: homogeneous_basis(spec, g, m, strict=False) for m in (-1, 0, 1)}
        for _ in range(5):
            x, y, z = (_combo(r, bases[int(r.integers(-1, 2))]) for _ in range(3))
            n += 1
            try:
                cocycle_value(x, y, w, spec)
                cocycle_value(y, z, w, spec)
                cocycle_value(z, x, w, spec)
                holo += 1
            except HolomorphyViolation:
                pass
            v = lambda a, b: cocycle_value(a, b, w, spec, False)
            c = int(r.integers(-4, 5))
            laws += (v(x, y) == -v(y, x)
                     and v(global_bracket(x, y), z) + v(global_bracket(y, z), x) + v(global_bracket(z, x), y) == 0
                     and v(element_add(x, z.scale(c)), y) == v(x, y) + c * v(z, y))
        sw = locality_sweep(spec, g, w, 4)
        local.append((name, sw.ok, sw.window))
        corrected.append((name, locality_sweep(spec, g, w, 4, True).ok))
    ok = holo == laws == n and all(o for _, o, _ in local)
    detail = (f"holomorphy {holo}/{n}, antisymmetry+cocycle identity+bilinearity {laws}/{n}; locality "
              + ", ".join(f"{nm} {'ok' if o else 'VIOLATED'} window [{wd[0]}, {wd[1]}]" for nm, o, wd in local)
              + "; corrected window " + ", ".join(f"{nm} {'ok' if o else 'VIOLATED'}" for nm, o in corrected))
    criterion(9, "local 2-cocycle", ok, detail)
    assert holo == n and laws == n
    assert all(o for _, o, _ in local)


def test_criterion_10_determinism(criterion, tmp_path):
    cfg = tmp_path / "c.json"
    d = default_config()
    d["trials"] = 3
    cfg.write_text(json.dumps(d))
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["verify", "--config", str(cfg), "--out", str(out)])
        outs.append(out.read_bytes())
    same = outs[0] == outs[1]
    n = len(json.loads(outs[0])["records"])
    assert criterion(10, "deterministic reports", same, f"two runs, {n} records, byte-identical: {same}")
