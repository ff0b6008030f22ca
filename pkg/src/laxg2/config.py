"""Run configuration: one JSON file describing the surface, grading and suites."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .exact import fmt
from .sphere import GradingSpec, InvalidGrading, SurfaceSpec
from .tyurin import DegenerateDatum, TyurinDatum

SUITES = ("g2", "jets", "tyurin", "grading", "cocycle")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def parse_mrange(s) -> tuple[int, int]:
    if isinstance(s, (list, tuple)) and len(s) == 2:
        lo, hi = s
    else:
        try:
            lo, hi = str(s).split(":")
        except ValueError:
            raise ConfigError("mrange", f"expected 'lo:hi', got {s!r}") from None
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ConfigError("mrange", f"bounds must be integers, got {s!r}") from None
    if lo > hi:
        raise ConfigError("mrange", f"empty range {lo}:{hi}")
    return lo, hi


def parse_suites(s) -> tuple:
    items = s.split(",") if isinstance(s, str) else list(s)
    items = [x.strip() for x in items if x.strip()]
    bad = [x for x in items if x not in SUITES]
    if bad:
        raise ConfigError("suites", f"unknown suites {bad}; choose from {list(SUITES)}")
    # canonical order keeps reports independent of how the list was written
    return tuple(x for x in SUITES if x in items)


@dataclass(frozen=True)
class RunConfig:
    surface: SurfaceSpec
    grading: GradingSpec
    suites: tuple = SUITES
    seed: int = 0
    trials: int = 10
    T: int = 3
    mrange: tuple = (-3, 3)

    def to_json(self) -> dict:
        return {"surface": self.surface.to_json(), "grading": self.grading.to_json(),
                "suites": list(self.suites), "seed": self.seed, "trials": self.trials,
                "T": self.T, "mrange": f"{self.mrange[0]}:{self.mrange[1]}"}

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        if "suites" in kw:
            kw["suites"] = parse_suites(kw["suites"])
        if "mrange" in kw:
            kw["mrange"] = parse_mrange(kw["mrange"])
        return replace(self, **kw)


def _int(d, key, default, minimum=None):
    v = d.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def config_from_json(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "expected a JSON object")
    for key in ("surface", "grading"):
        if key not in d:
            raise ConfigError(key, "missing")
    s = d["surface"]
    for key in ("P", "Q", "tyurin"):
        if key not in s:
            raise ConfigError(f"surface.{key}", "missing")
    tyurin = []
    for i, t in enumerate(s["tyurin"]):
        try:
            tyurin.append(TyurinDatum.from_json(t))
        except DegenerateDatum as exc:
            raise ConfigError(f"surface.tyurin[{i}]", str(exc)) from None
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"surface.tyurin[{i}]", f"malformed datum: {exc}") from None
    try:
        surface = SurfaceSpec(tuple(s["P"]), tuple(s["Q"]), tuple(tyurin), int(s.get("genus", 0)))
    except (ValueError, TypeError) as exc:
        raise ConfigError("surface", str(exc)) from None
    g = d["grading"]
    try:
        grading = GradingSpec.from_json(g)
        grading.validate(surface)
    except InvalidGrading as exc:
        raise ConfigError("grading", str(exc)) from None
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError("grading", f"malformed grading: {exc}") from None
    cfg = RunConfig(surface, grading,
                    parse_suites(d.get("suites", list(SUITES))),
                    _int(d, "seed", 0), _int(d, "trials", 10, 1), _int(d, "T", 3, 3),
                    parse_mrange(d.get("mrange", "-3:3")))
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}", exc.msg) from None
    except OSError as exc:
        raise ConfigError("config", str(exc)) from None
    return config_from_json(d)


def default_config() -> dict:
    return {"surface": {"genus": 0, "P": ["0"], "Q": ["inf"],
                        "tyurin": [{"gamma": "1", "alpha1": ["1", "0", "0"], "alpha2": ["0", "1", "0"]}]},
            "grading": {"a": ["1"], "b": "const:0"}, "T": 3}


def describe(cfg: RunConfig) -> str:
    s = cfg.surface
    return (f"N={s.N} M={s.M} K={s.K} P={[fmt(p) for p in s.p_points]} "
            f"a={[fmt(a) for a in cfg.grading.a]} b={cfg.grading.b_rule}")
