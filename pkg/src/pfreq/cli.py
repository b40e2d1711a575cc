"""Command-line front end: ``pfreq run|reproduce-all|list-domains|bench``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import asymptotics as A
from .asymptotics import Record
from .config import ConfigError, ExperimentConfig, load_config
from .geometry import KINDS, make_domain, rasterize
from .report import csv_text, failing_tags, summary_text, write_all
from .solvers import (
    pi_pq,
    principal_frequency,
    radial_ball_frequency,
    set_tolerance_scale,
    solve_lane_emden,
)

EXIT_OK, EXIT_AUDIT_FAILED, EXIT_CONFIG = 0, 1, 2

DOMAIN_HELP = {
    "interval": "a, b",
    "box": "extents = [..], lower = [..] (optional)",
    "ball": "R, N = 2, center (optional)",
    "annulus": "R_in, R_out, N = 2, center (optional)",
    "tower": "N, m, eps in [0, 2^-(m+1))",
    "punctured_box": "N, M, eps in [0, 1/2)",
    "strip": "alpha or alpha2 > (log 2)^-3, R",
}


def _solve(cfg: ExperimentConfig) -> list[Record]:
    P = cfg.params
    p, q, dom = P["p"], P["q"], cfg.domain
    tol = P.get("tol")
    if "h" not in P and dom.kind == "interval":
        rep = pi_pq(p, q, nodes=P["nodes"], tol=tol, check=False)
        L = dom.params["b"] - dom.params["a"]
        e = p - 1.0 + (0.0 if q == math.inf else p / q)
        lam = rep.constant**p / L**e
        return [Record("solve", "plumbing", dom.label, 1, L / P["nodes"], p, q, rep.route, value=lam,
                       value_pow_1_over_p=lam ** (1 / p), iterations=rep.iterations, seconds=rep.seconds,
                       detail=dict(rep.residuals))]
    if "h" not in P or P["route"] == "radial":
        rep = radial_ball_frequency(p, q, dom.dimension, dom.params["R"], P.get("nodes", 512), tol)
    elif P["route"] == "lane_emden":
        rep = solve_lane_emden(rasterize(dom, P["h"]), p, q, tol)
    else:
        rep = principal_frequency(rasterize(dom, P["h"]), p, q, tol)
    rec = A._from_report(rep, "solve", "plumbing")
    if rep.extra.get("bound"):
        rec.note = rep.extra["bound"]
    return [rec]


def _sweep_entry(args):
    domain, q, p, h, scale = args
    set_tolerance_scale(scale)
    return A.sweep_p_entry(domain, q, p, h)


def execute(cfg: ExperimentConfig, workers: int = 1, tol_scale: float = 1.0) -> list[Record]:
    P, dom, kind = cfg.params, cfg.domain, cfg.kind
    if kind == "solve":
        return _solve(cfg)
    if kind == "sweep_p":
        ps = P["p"]
        jobs = [(dom, P["q"], p, P["h"], tol_scale) for p in ps]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_sweep_entry, jobs))
        else:
            parts = [_sweep_entry(j) for j in jobs]
        rows = [r for part in parts for r in part]
        return rows + A.sweep_p_audits(rows, ps)
    if kind == "sweep_q":
        return A.sweep_q_to_sup(dom, P["p"], P["q"], P.get("h"), P.get("nodes", 512))
    if kind == "audit":
        return A.bounds_audit(dom, P["p"], P["q"], P["h"], P.get("nodes", 512))
    if kind == "tower":
        return A.tower_decay_experiment(P["N"], P["p"], P["q"], P["m"], P["h"])
    if kind == "strip":
        return A.strip_barrier_experiment(dom.params["alpha"] ** 2, P["R"], P["h"], P["R_prime"],
                                          raise_on_violation=False)
    if kind == "geometry":
        return A.geometry_audit(P["h"])
    raise ValueError(kind)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out_dir or cfg.out_dir or "pfreq-out")
    workers = args.workers or cfg.workers
    set_tolerance_scale(args.tolerance_scale)
    records: list[Record] = []
    try:
        records = execute(cfg, workers, args.tolerance_scale)
    except Exception as exc:
        records.append(Record(cfg.kind, "plumbing", route="error", passed=False,
                              note=f"{type(exc).__name__}: {exc}"))
    finally:
        # flush whatever exists, even after a failure
        write_all(records, out_dir, args.timings, args.plots or cfg.plots, stem=Path(args.config).stem)
    sys.stdout.write(csv_text(records, args.timings))
    bad = failing_tags(records)
    if bad:
        print(f"failed: {', '.join(bad)}", file=sys.stderr)
        return EXIT_AUDIT_FAILED
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .reproduce import reproduce_all

    only = [s.strip() for s in args.only.split(",")] if args.only else None
    records, timings = reproduce_all(only, args.workers or 1, args.tolerance_scale)
    out_dir = Path(args.out_dir or "pfreq-reproduce")
    write_all(records, out_dir, args.timings, args.plots, stem="reproduce")
    if args.timings:
        (out_dir / "timings.json").write_text(json.dumps(timings, indent=1) + "\n")
    sys.stdout.write(summary_text(records))
    bad = failing_tags(records)
    if bad:
        print(f"failing tags: {', '.join(bad)}", file=sys.stderr)
        return EXIT_AUDIT_FAILED
    return EXIT_OK


def cmd_list_domains(args) -> int:
    for kind in KINDS:
        print(f"{kind:<14} {DOMAIN_HELP[kind]}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import format_table, run_benchmark

    print(format_table(run_benchmark(h=1.0 / args.n, repeat=args.repeat)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pfreq", description="Principal frequencies, Hardy and Morrey constants on grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--workers", type=int, default=None, help="worker processes")
        sp.add_argument("--out-dir", default=None, help="directory for CSV/JSON/plots")
        sp.add_argument("--plots", action="store_true", help="write SVG plots")
        sp.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply default solver tolerances")
        sp.add_argument("--timings", action="store_true", help="fill the seconds column (breaks byte-identical CSV)")

    r = sub.add_parser("run", help="run one experiment from a TOML config")
    r.add_argument("config")
    common(r)
    r.set_defaults(func=cmd_run)
    ra = sub.add_parser("reproduce-all", help="run every pinned acceptance experiment")
    ra.add_argument("--only", default=None, help="comma-separated criteria or job names, e.g. C4,C11")
    common(ra)
    ra.set_defaults(func=cmd_reproduce)
    ld = sub.add_parser("list-domains", help="catalog of domain kinds and parameters")
    ld.set_defaults(func=cmd_list_domains)
    b = sub.add_parser("bench", help="numba versus numpy kernel timings")
    b.add_argument("--n", type=int, default=128, help="cells per side of the unit square")
    b.add_argument("--repeat", type=int, default=5)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tolerance_scale", 1.0) <= 0:
        print("--tolerance-scale must be positive", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
