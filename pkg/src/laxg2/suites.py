"""Seeded verification suites and the JSON report.

All randomness comes from the config seed and is drawn suite by suite in
the fixed order g2, jets, tyurin, grading, cocycle.
Each suite draws from its own child stream (spawned from the seed in that
order), so dropping a suite never changes what the others see.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cocycle import (HolomorphyViolation, build_omega, cocycle_matrix, cocycle_value, kappa_sum,
                      locality_sweep, omega_params, residue_trace_Lomega, residue_trace_LdL)
from .config import SUITES, RunConfig
from .exact import Q, fmt
from .g2 import (DIM, bracket, block_identity, embed, project, random_element, random_vector,
                 relation_checks, trace_form)
from .jets import MatrixJet, jet_commutator, jet_derivative, jet_product, trace_jet
from .sphere import (dim_homogeneous, element_add, expand_at, global_bracket,
                     grading_check, homogeneous_basis, joint_rank)
from .tyurin import (GENERIC_RELATIONS, CLAIMED_BREAKDOWN, admissible_jet_basis, closure_check,
                     effective_relation_count, extract_params, is_admissible, random_admissible_rng,
                     random_datum)


@dataclass
class Record:
    id: str
    anchor: str
    params: dict
    expected: object
    actual: object
    passed: bool
    kind: str = "assert"         # "measure" records report a value and always pass

    def to_json(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "params": self.params, "expected": self.expected,
                "actual": self.actual, "pass": self.passed, "kind": self.kind}


@dataclass
class Report:
    config: dict
    records: list = field(default_factory=list)

    def add(self, id, anchor, expected, actual, params=None, passed=None, kind="assert"):
        if passed is None:
            passed = expected == actual
        self.records.append(Record(id, anchor, params or {}, expected, actual, bool(passed), kind))

    def count(self, id, anchor, outcomes, params=None):
        """Record how many of a list of boolean outcomes hold; passes iff all do."""
        outcomes = list(outcomes)
        self.add(id, anchor, len(outcomes), sum(1 for o in outcomes if o), params)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        n = len(self.records)
        p = sum(1 for r in self.records if r.passed)
        return {"total": n, "passed": p, "failed": n - p}

    def to_json(self) -> dict:
        recs = sorted(self.records, key=lambda r: r.id)
        return {"config": self.config, "records": [r.to_json() for r in recs], "summary": self.summary()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


# -- g2 ------------------------------------------------------------------------------

def suite_g2(cfg: RunConfig, rng, rep: Report):
    t = cfg.trials
    triples = [(random_element(rng), random_element(rng), random_element(rng)) for _ in range(t)]
    rels = [relation_checks(random_vector(rng), random_vector(rng), random_element(rng).A) for _ in range(t)]
    anchor = "G2 closure under the matrix commutator"
    p = {"trials": t}
    rep.count("g2.bracket_vs_7x7", anchor,
              (project(embed(x) @ embed(y) - embed(y) @ embed(x)) == bracket(x, y) for x, y, _ in triples), p)
    rep.count("g2.jacobi", anchor,
              ((bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))).is_zero()
               for x, y, z in triples), p)
    rep.count("g2.block_identity", anchor, (block_identity(x, y) for x, y, _ in triples), p)
    for name in ("skew_times_vector", "skew_product", "skew_conjugation", "skew_of_cross"):
        rep.count(f"g2.relation.{name}", "skew-matrix relations", (r[name] for r in rels), p)

    def closed(x, y):
        return 2 * sum(x.A[i][j] * y.A[j][i] for i in range(3) for j in range(3)) - 6 * (
            sum(a * b for a, b in zip(x.a1, y.a2)) + sum(a * b for a, b in zip(x.a2, y.a1)))
    rep.count("g2.trace_form_closed", "invariant trace form",
              (trace_form(x, y) == closed(x, y) for x, y, _ in triples), p)
    rep.count("g2.trace_form_invariant", "invariant trace form",
              (trace_form(bracket(x, y), z) == trace_form(x, bracket(y, z)) for x, y, z in triples), p)


# -- jets ----------------------------------------------------------------------------

def _random_jet(rng, lo, hi, density=1.0):
    coeffs = {}
    for n in range(lo, hi + 1):
        if rng.random() < density:
            coeffs[n] = random_element(rng, 3)
    return MatrixJet(coeffs, lo, hi)


def suite_jets(cfg: RunConfig, rng, rep: Report):
    t = cfg.trials
    pairs = [(_random_jet(rng, -2, cfg.T), _random_jet(rng, -2, cfg.T)) for _ in range(t)]
    anchor = "Laurent expansion arithmetic"
    p = {"trials": t, "T": cfg.T}
    rep.count("jets.commutator_vs_product", anchor,
              (jet_commutator(x, y) == (jet_product(x, y) - jet_product(y, x)).project() for x, y in pairs), p)
    rep.count("jets.trace_of_commutator", anchor,
              (trace_jet(jet_product(x, y) - jet_product(y, x)).is_zero() for x, y in pairs), p)

    def leibniz(x, y):
        lhs = jet_derivative(jet_commutator(x, y))
        rhs = jet_commutator(jet_derivative(x), y) + jet_commutator(x, jet_derivative(y))
        lo, hi = max(lhs.lo, rhs.lo), min(lhs.hi, rhs.hi)
        return lhs.restrict(lo, hi) == rhs.restrict(lo, hi)
    rep.count("jets.leibniz", anchor, (leibniz(x, y) for x, y in pairs), p)

    def window(x, y):
        # x, y are Laurent polynomials on [-2, 2]; truncating at T >= 2 loses nothing
        full = jet_commutator(MatrixJet(x.coeffs, -2, 8), MatrixJet(y.coeffs, -2, 8))
        cut = jet_commutator(x, y)
        return all(cut[n] == full[n] for n in cut.orders())
    polys = [(_random_jet(rng, -2, 2), _random_jet(rng, -2, 2)) for _ in range(t)]
    rep.count("jets.window_bookkeeping", anchor, (window(x, y) for x, y in polys), p)


# -- tyurin --------------------------------------------------------------------------

def _data(cfg: RunConfig, rng, extra: int = 4):
    return list(cfg.surface.tyurin) + [random_datum(rng) for _ in range(extra)]


def suite_tyurin(cfg: RunConfig, rng, rep: Report):
    data = _data(cfg, rng)
    anchor_count = "relation count at a Tyurin point"
    for i, d in enumerate(data):
        p = {"datum": d.to_json()}
        rc = effective_relation_count(d)
        rep.add(f"tyurin.relations.total.{i}", anchor_count, GENERIC_RELATIONS, rc.total, p)
        rep.add(f"tyurin.relations.breakdown.{i}", anchor_count, dict(CLAIMED_BREAKDOWN),
                {k: v for k, v in rc.as_dict().items() if k != "total"}, p)
        for T in (1, 3):
            rep.add(f"tyurin.basis_dim.T{T}.{i}", "admissible jet space dimension",
                    DIM * (T + 3) - GENERIC_RELATIONS, len(admissible_jet_basis(d, T)), p)
    anchor = "closure of admissible jets under the commutator"
    for i, d in enumerate(data):
        p = {"datum": d.to_json(), "trials": cfg.trials}
        rs = []
        for _ in range(cfg.trials):
            x = random_admissible_rng(d, cfg.T, rng)
            y = random_admissible_rng(d, cfg.T, rng)
            rs.append(closure_check(x, y, d))
        rep.count(f"tyurin.closure.{i}", anchor, (r.ok for r in rs), p)
        rep.count(f"tyurin.mu_residue_formula.{i}", "order -2 coefficient of the commutator",
                  (r.mu_residue_part for r in rs), p)
        rep.count(f"tyurin.mu_full_formula.{i}", "order -2 coefficient of the commutator",
                  (r.mu_full for r in rs), p)
        x = random_admissible_rng(d, cfg.T, rng)
        y = random_admissible_rng(d, cfg.T, rng)
        c = Q(int(rng.integers(-5, 6)))
        px, py, pz = extract_params(x, d), extract_params(y, d), extract_params(x + y.scale(c), d)
        lin = all(a + c * b == s for a, b, s in zip(px.vector(), py.vector(), pz.vector()))
        rep.add(f"tyurin.params_linear.{i}", "admissible parameters", True, lin, p)


# -- grading -------------------------------------------------------------------------

def dimension_table(cfg: RunConfig, spreads: bool = True) -> dict:
    spec, g = cfg.surface, cfg.grading
    lo, hi = cfg.mrange
    dims = {m: dim_homogeneous(spec, g, m) for m in range(lo, hi + 1)}
    out = {"expected": DIM * spec.N, "dims": dims, "flags": [m for m, v in dims.items() if v != DIM * spec.N]}
    if spreads:
        table = {}
        for k in range(lo, hi + 1):
            for l in range(k, hi + 1):
                r = grading_check(spec, g, k, l)
                table[(k, l)] = r.spread
        out["spread"] = table
    return out


def suite_grading(cfg: RunConfig, rng, rep: Report):
    spec, g = cfg.surface, cfg.grading
    lo, hi = cfg.mrange
    p = {"N": spec.N, "M": spec.M, "K": spec.K}
    tab = dimension_table(cfg, spreads=False)
    for m, v in tab["dims"].items():
        rep.add(f"grading.dim.m{m:+d}", "dim L_m = 14 N", DIM * spec.N, v, dict(p, m=m))
    r, n = joint_rank(spec, g, (lo, hi))
    rep.add("grading.joint_independence", "direct sum of homogeneous subspaces", n, r,
            dict(p, window=[lo, hi]))
    simple = spec.N == 1 and spec.M == 1
    for k in range(max(lo, -1), min(hi, 1) + 1):
        for l in range(k, min(hi, 1) + 1):
            s = grading_check(spec, g, k, l)
            rid = f"grading.spread.{k:+d}.{l:+d}"
            if simple:
                rep.add(rid, "almost graded bracket", 0, s.spread, dict(p, k=k, l=l))
            else:
                rep.add(rid, "almost graded bracket", None, s.spread, dict(p, k=k, l=l), True, "measure")
    # every basis element is admissible at every Tyurin point
    ok = []
    for m in sorted({lo, 0, hi}):
        for b in homogeneous_basis(spec, g, m, strict=False):
            ok += [is_admissible(expand_at(b, d.gamma, 1), d).ok for d in spec.tyurin]
            for pt in spec.p_points:
                j = expand_at(b, pt, m)
                ok.append(all(j[n].is_zero() for n in range(j.lo, m)))
    rep.count("grading.basis_admissible", "elements of L_m", ok, p)


# -- cocycle -------------------------------------------------------------------------

def _random_combo(rng, basis, k=3):
    idx = rng.choice(len(basis), size=min(k, len(basis)), replace=False)
    out = None
    for i in sorted(int(j) for j in idx):
        c = Q(int(rng.integers(1, 4)))
        e = basis[i].scale(c)
        out = e if out is None else element_add(out, e)
    return out


def suite_cocycle(cfg: RunConfig, rng, rep: Report):
    spec, g = cfg.surface, cfg.grading
    w = build_omega(spec, int(rng.integers(0, 2**31)))
    p = {"budget": list(w.budget), "m_plus": list(w.m_plus), "m_minus": list(w.m_minus)}
    for s, d in enumerate(spec.tyurin):
        rep.add(f"cocycle.omega_params.{s}", "expansion of omega at Tyurin points", [],
                omega_params(w, d).violations(d), dict(p, gamma=fmt(d.gamma)))
    t = cfg.trials
    for s, d in enumerate(spec.tyurin):
        xs = [(random_admissible_rng(d, cfg.T, rng), random_admissible_rng(d, cfg.T, rng)) for _ in range(t)]
        rep.count(f"cocycle.residue_LdL.{s}", "res tr(L dL') = 2(kappa1+kappa2)([L,L'])",
                  (residue_trace_LdL(x, y, d) == 2 * kappa_sum(jet_commutator(x, y), d) for x, y in xs),
                  {"trials": t})
        rep.count(f"cocycle.residue_Lomega.{s}", "res tr(L omega) = 2(kappa1+kappa2)(L)",
                  (residue_trace_Lomega(x, w, spec, s) == 2 * kappa_sum(x, d) for x, _ in xs), {"trials": t})
    lo, hi = cfg.mrange
    degs = list(range(max(lo, -2), min(hi, 2) + 1))
    bases = {m: homogeneous_basis(spec, g, m, strict=False) for m in degs}
    triples = []
    for _ in range(t):
        ms = [int(rng.choice(degs)) for _ in range(3)]
        triples.append(tuple(_random_combo(rng, bases[m]) for m in ms))

    def holo(x, y):
        try:
            cocycle_value(x, y, w, spec)
            return True
        except HolomorphyViolation:
            return False
    rep.count("cocycle.holomorphy", "tr(L dL' - omega[L,L']) holomorphic at Tyurin points",
              (holo(x, y) for x, y, _ in triples), {"trials": t})
    rep.count("cocycle.antisymmetry", "cocycle laws",
              (cocycle_value(x, y, w, spec, False) == -cocycle_value(y, x, w, spec, False) for x, y, _ in triples))

    def identity(x, y, z):
        return (cocycle_value(global_bracket(x, y), z, w, spec, False)
                + cocycle_value(global_bracket(y, z), x, w, spec, False)
                + cocycle_value(global_bracket(z, x), y, w, spec, False)) == 0
    rep.count("cocycle.two_cocycle_identity", "cocycle laws", (identity(*tr) for tr in triples), {"trials": t})

    def bilinear(x, y, z):
        c = Q(int(rng.integers(-4, 5)))
        lhs = cocycle_value(element_add(x, z.scale(c)), y, w, spec, False)
        return lhs == cocycle_value(x, y, w, spec, False) + c * cocycle_value(z, y, w, spec, False)
    rep.count("cocycle.bilinearity", "cocycle laws", (bilinear(*tr) for tr in triples), {"trials": t})

    # fast Gram-matrix path agrees with direct residues
    agree = []
    for m, n in ((0, 0), (degs[0], degs[-1])):
        G = cocycle_matrix(spec, g, w, m, n)
        for _ in range(3):
            i, j = int(rng.integers(0, G.shape[0])), int(rng.integers(0, G.shape[1]))
            agree.append(G[i, j] == cocycle_value(bases[m][i], bases[n][j], w, spec, False))
    rep.count("cocycle.fast_path", "cocycle on basis pairs", agree)
    for rid, corr in (("cocycle.locality", False), ("cocycle.locality_corrected", True)):
        sweep = locality_sweep(spec, g, w, 4, corr)
        rep.add(rid, "local cocycle", [], [list(v) for v in sweep.violations],
                dict(p, window=[fmt(Q(sweep.window[0])), int(sweep.window[1])], mmax=4))


SUITE_FUNCS = {"g2": suite_g2, "jets": suite_jets, "tyurin": suite_tyurin,
               "grading": suite_grading, "cocycle": suite_cocycle}


def run_suites(cfg: RunConfig) -> Report:
    rep = Report(cfg.to_json())
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(SUITES))
    for name, ss in zip(SUITES, seeds):
        if name in cfg.suites:
            SUITE_FUNCS[name](cfg, np.random.default_rng(ss), rep)
    return rep
