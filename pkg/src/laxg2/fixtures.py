"""Persisted bases, omega and sampled admissible jets for regression runs."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cocycle import OmegaForm, build_omega, kappa_sum, omega_params, residue_trace_Lomega
from .config import RunConfig, config_from_json
from .jets import MatrixJet
from .sphere import GlobalElement, expand_at, homogeneous_basis
from .suites import Report
from .tyurin import is_admissible, random_admissible_rng

FORMAT = 1


@dataclass
class Fixture:
    config: RunConfig
    bases: dict          # m -> list of GlobalElement
    omega: OmegaForm
    jets: list           # (tyurin index, MatrixJet)

    def to_json(self) -> dict:
        return {"format": FORMAT, "config": self.config.to_json(),
                "bases": {str(m): [b.to_json() for b in bs] for m, bs in sorted(self.bases.items())},
                "omega": self.omega.to_json(),
                "jets": [{"tyurin": s, "jet": j.to_json()} for s, j in self.jets]}

    @classmethod
    def from_json(cls, d) -> "Fixture":
        cfg = config_from_json(d["config"])
        bases = {int(m): [GlobalElement.from_json(b) for b in bs] for m, bs in d["bases"].items()}
        jets = [(int(e["tyurin"]), MatrixJet.from_json(e["jet"])) for e in d["jets"]]
        return cls(cfg, bases, OmegaForm.from_json(d["omega"]), jets)


def generate_fixture(cfg: RunConfig) -> Fixture:
    """Bases and omega depend only on the surface; the sampled jets depend on the seed."""
    lo, hi = cfg.mrange
    bases = {m: homogeneous_basis(cfg.surface, cfg.grading, m, strict=False) for m in range(lo, hi + 1)}
    omega = build_omega(cfg.surface, 0)
    rng = np.random.default_rng(cfg.seed)
    jets = [(s, random_admissible_rng(d, cfg.T, rng))
            for s, d in enumerate(cfg.surface.tyurin) for _ in range(cfg.trials)]
    return Fixture(cfg, bases, omega, jets)


def save_fixture(fix: Fixture, path):
    with open(path, "w") as fh:
        json.dump(fix.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_fixture(path) -> Fixture:
    with open(path) as fh:
        return Fixture.from_json(json.load(fh))


def verify_fixture(fix: Fixture) -> Report:
    """Re-check the stored objects directly, without rebuilding anything."""
    spec = fix.config.surface
    rep = Report(fix.config.to_json())
    for m, bs in sorted(fix.bases.items()):
        ok = []
        for b in bs:
            ok += [is_admissible(expand_at(b, d.gamma, 1), d).ok for d in spec.tyurin]
            for p in spec.p_points:
                j = expand_at(b, p, m)
                ok.append(all(j[n].is_zero() for n in range(j.lo, m)))
        rep.count(f"fixture.basis.m{m:+d}", "elements of L_m", ok, {"size": len(bs)})
    for s, d in enumerate(spec.tyurin):
        rep.add(f"fixture.omega.{s}", "expansion of omega at Tyurin points", [],
                omega_params(fix.omega, d).violations(d))
    ok_adm, ok_res = [], []
    for s, j in fix.jets:
        d = spec.tyurin[s]
        adm = is_admissible(j, d).ok
        ok_adm.append(adm)
        ok_res.append(adm and residue_trace_Lomega(j, fix.omega, spec, s) == 2 * kappa_sum(j, d))
    rep.count("fixture.jets.admissible", "admissible jets", ok_adm)
    rep.count("fixture.jets.residue_Lomega", "res tr(L omega) = 2(kappa1+kappa2)(L)", ok_res)
    return rep
