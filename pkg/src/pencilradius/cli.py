"""Command-line driver: radius, gamma-seq, check, gen.

Exit codes: 0 success, 1 hard error (bad input, unreliable oracle at the
command level), 2 computed-but-hypothesis-violated (scripts sweeping a corpus
must be able to tell math warnings from tool failures).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import checks, fileio, generator
from .exceptions import PencilRadiusError
from .geninv import OptBudget
from .radius import WARN_HYPOTHESIS, SearchConfig, d_bartlay, full_report


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if math.isinf(x):
        return "inf"
    return f"{x:.6f}"


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--eps-rel", type=float, default=1e-10,
                   help="relative rank tolerance (default 1e-10)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for all randomized steps (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pencil-radius",
        description="Stability radius of a matrix pencil lambda -> T - lambda*S "
                    "by three independent estimators.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_rad = subs.add_parser("radius", help="run all three estimators and report")
    p_rad.add_argument("input", help="pencil JSON file")
    _add_common(p_rad)
    p_rad.add_argument("--m-max", type=int, default=12,
                       help="gamma table length (default 12)")
    p_rad.add_argument("--samples", type=int, default=64,
                       help="disk samples for complement validation (default 64)")
    p_rad.add_argument("--budget-starts", type=int, default=24,
                       help="optimizer multi-starts (default 24)")
    p_rad.add_argument("--budget-evals", type=int, default=2000,
                       help="objective evaluations per start (default 2000)")
    p_rad.add_argument("--rmax", type=float, default=None,
                       help="search bound for drop points (default: auto)")
    p_rad.add_argument("--json-out", default=None,
                       help="write the canonical JSON report here")

    p_gam = subs.add_parser("gamma-seq", help="emit the gamma_m table as CSV")
    p_gam.add_argument("input", help="pencil JSON file")
    _add_common(p_gam)
    p_gam.add_argument("--m-max", type=int, default=12)
    p_gam.add_argument("--csv", default=None,
                       help="CSV output path (default: stdout)")

    p_chk = subs.add_parser("check", help="run the invariant suite")
    p_chk.add_argument("input", help="pencil JSON file")
    _add_common(p_chk)
    p_chk.add_argument("--samples", type=int, default=64,
                       help="disk samples for complement validation (default 64)")

    p_gen = subs.add_parser("gen", help="generate a pencil with planted ground truth")
    p_gen.add_argument("out", help="output pencil JSON file")
    p_gen.add_argument("--n", type=int, required=True, help="column dimension")
    p_gen.add_argument("--p", type=int, default=None,
                       help="row dimension (defaults to the kind's natural choice)")
    p_gen.add_argument("--drops", default=None,
                       help="comma-separated drop points, e.g. 0.7,2.0 or 1+2j")
    p_gen.add_argument("--kind", choices=generator.KINDS, default="regular")
    p_gen.add_argument("--seed", type=int, required=True,
                       help="generator seed (required)")
    return parser


def _load(path):
    try:
        return fileio.load_pencil(path)
    except json.JSONDecodeError as exc:
        raise PencilRadiusError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    except OSError as exc:
        raise PencilRadiusError(f"{path}: {exc}") from exc


def cmd_radius(args) -> int:
    p, _meta = _load(args.input)
    search = SearchConfig(eps_rel=args.eps_rel, r_max=args.rmax, seed=args.seed)
    budget = OptBudget(starts=args.budget_starts, evals=args.budget_evals,
                       seed=args.seed)

    t0 = time.perf_counter()
    report = full_report(p, search, budget, m_max=args.m_max, eps_rel=args.eps_rel)
    elapsed = time.perf_counter() - t0

    print(f"d ≈ {_fmt(report.d_oracle)} (oracle) | {_fmt(report.d_bartlay)} "
          f"(bart-lay) | {_fmt(report.d_geninv)} (gen-inv), k={report.k}")
    for w in report.warnings:
        print(f"warning[{w['kind']}]: {w['detail']}")
    print(f"wall clock: {elapsed:.3f}s total")

    if args.json_out:
        echo = {
            "command": "radius", "input": args.input, "eps_rel": args.eps_rel,
            "m_max": args.m_max, "samples": args.samples, "seed": args.seed,
            "budget_starts": args.budget_starts, "budget_evals": args.budget_evals,
            "rmax": args.rmax,
        }
        fileio.save_report(args.json_out, report, echo)

    hypothesis_violated = any(w["kind"] == WARN_HYPOTHESIS for w in report.warnings)
    return 2 if hypothesis_violated else 0


def cmd_gamma_seq(args) -> int:
    p, _meta = _load(args.input)
    result = d_bartlay(p, m_max=args.m_max, eps_rel=args.eps_rel)
    text = fileio.gamma_table_csv(result.table)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args) -> int:
    p, _meta = _load(args.input)
    rows = checks.run_suite(p, n_samples=args.samples, seed=args.seed,
                            eps_rel=args.eps_rel)
    print(checks.format_rows(rows))
    return 1 if checks.suite_failed(rows) else 0


def cmd_gen(args) -> int:
    drops = None
    if args.drops:
        try:
            drops = [complex(tok.strip()) for tok in args.drops.split(",") if tok.strip()]
        except ValueError as exc:
            raise PencilRadiusError(f"bad --drops value: {exc}") from exc
    p, meta = generator.generate(args.kind, args.n, args.p, drops, args.seed)
    fileio.save_pencil(args.out, p, meta)
    print(f"wrote {args.out}: {meta['p']}x{meta['n']} {meta['kind']} pencil, "
          f"seed {meta['seed']}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"radius": cmd_radius, "gamma-seq": cmd_gamma_seq,
                "check": cmd_check, "gen": cmd_gen}
    try:
        return handlers[args.command](args)
    except PencilRadiusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
