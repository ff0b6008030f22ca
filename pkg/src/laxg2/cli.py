"""laxg2 command line: verify, table, fixture.

Exit codes: 0 every check passed, 1 some check failed, 2 bad config or a
degenerate configuration.
"""
from __future__ import annotations

import argparse
import json
import sys

from .cocycle import NoSolution
from .config import ConfigError, load_config
from .fixtures import generate_fixture, load_fixture, save_fixture, verify_fixture
from .sphere import DegenerateConfiguration, InvalidGrading
from .suites import dimension_table, run_suites
from .tyurin import DegenerateDatum

USAGE_ERRORS = (ConfigError, DegenerateConfiguration, DegenerateDatum, InvalidGrading, NoSolution)


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_verify(args) -> int:
    cfg = load_config(args.config).with_overrides(suites=args.suites, seed=args.seed, trials=args.trials)
    rep = run_suites(cfg)
    _write(rep.dumps() + "\n", args.out)
    s = rep.summary()
    print(f"{s['passed']}/{s['total']} checks passed", file=sys.stderr)
    for r in rep.records:
        if not r.passed:
            print(f"FAIL {r.id}: expected {r.expected!r}, got {r.actual!r}", file=sys.stderr)
    return 0 if rep.ok else 1


def cmd_table(args) -> int:
    cfg = load_config(args.config).with_overrides(mrange=args.mrange)
    tab = dimension_table(cfg, spreads=not args.no_spread)
    if args.json:
        out = {"expected": tab["expected"], "dims": {str(m): v for m, v in tab["dims"].items()},
               "flags": tab["flags"]}
        if "spread" in tab:
            out["spread"] = {f"{k},{l}": v for (k, l), v in tab["spread"].items()}
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"{'m':>4}  dim L_m")
        for m, v in tab["dims"].items():
            flag = "" if v == tab["expected"] else f"  (expected {tab['expected']})"
            print(f"{m:>4}  {v}{flag}")
        if "spread" in tab:
            print("\n   k    l  spread")
            for (k, l), v in tab["spread"].items():
                print(f"{k:>4} {l:>4}  {'-' if v is None else v}")
    return 0 if not tab["flags"] else 1


def cmd_fixture(args) -> int:
    if args.check:
        rep = verify_fixture(load_fixture(args.check))
        _write(rep.dumps() + "\n", args.out)
        return 0 if rep.ok else 1
    if not args.config:
        raise ConfigError("--config", "required unless --check is given")
    cfg = load_config(args.config).with_overrides(seed=args.seed, trials=args.trials)
    fix = generate_fixture(cfg)
    if args.out in (None, "-"):
        print(json.dumps(fix.to_json(), indent=1, sort_keys=True))
    else:
        save_fixture(fix, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laxg2", description="Exact checks for G2 Lax operator algebras on the sphere.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run verification suites and write a JSON report")
    v.add_argument("--config", required=True)
    v.add_argument("--suites", help="comma-separated subset of g2,jets,tyurin,grading,cocycle")
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--out", default="-")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="dimensions of L_m and measured spreads")
    t.add_argument("--config", required=True)
    t.add_argument("--mrange", help="lo:hi, e.g. -3:3")
    t.add_argument("--json", action="store_true")
    t.add_argument("--no-spread", action="store_true")
    t.set_defaults(func=cmd_table)

    f = sub.add_parser("fixture", help="write (or --check) a regression fixture")
    f.add_argument("--config")
    f.add_argument("--seed", type=int)
    f.add_argument("--trials", type=int)
    f.add_argument("--out", default="-")
    f.add_argument("--check", metavar="FIXTURE", help="re-verify a stored fixture instead")
    f.set_defaults(func=cmd_fixture)
    return ap


def _glue_negative(argv):
    """Let "--mrange -3:3" through: argparse would read -3:3 as an option."""
    out, it = [], iter(argv)
    for a in it:
        if a == "--mrange":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--mrange={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative(argv))
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
