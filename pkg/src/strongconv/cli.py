"""Command-line interface.

Subcommands::

    strongconv run <scenario> [--config FILE] [--seed U64] [--out DIR]
                   [--workers N] [--format json|csv|both] [--no-plots]
    strongconv oracle moment "<word>" [--gen semicircular|haar]
    strongconv oracle norm "<poly>" [--gen semicircular|haar] [--qmax Q] [--r R]
    strongconv dorb <fileA> <fileB> [--exact] [--restarts N] [--seed U64]
    strongconv report <run.json> [--out DIR] [--format csv|both] [--no-plots]

Matrix tuple files are the binary format documented in
:mod:`strongconv.records` (a ``.bin`` payload with a ``.json`` sidecar).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import freeprob, orbit
from .freeprob import GeneratorSpec
from .ncpoly import NcPoly, parse, parse_monomial
from .records import RunRecord, emit, load_mat_tuple
from .scenarios import ScenarioSpec, canonical_id, run_scenario

_GEN_KINDS = {"semicircular": "semicircular", "haar": "haar_unitary"}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="strongconv",
                                  description="random-matrix convergence lab")
    sub = top.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and persist its record")
    p_run.add_argument("scenario", help="scenario id (ht-strong ... witness, or s1..s9)")
    p_run.add_argument("--config", type=Path, help="JSON file of parameter overrides")
    p_run.add_argument("--seed", type=int, help="master seed override")
    p_run.add_argument("--out", type=Path, default=Path("runs"), help="output directory")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--format", choices=("json", "csv", "both"), default="both")
    p_run.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering next to the tables")

    p_oracle = sub.add_parser("oracle", help="query the limit moment/norm oracles")
    o_sub = p_oracle.add_subparsers(dest="oracle_command", required=True)

    p_mom = o_sub.add_parser("moment", help="moment of one word, e.g. \"T1 T2' T1\"")
    p_mom.add_argument("word")
    p_mom.add_argument("--gen", choices=tuple(_GEN_KINDS), default="semicircular")

    p_norm = o_sub.add_parser("norm", help="limit norm bounds of a polynomial")
    p_norm.add_argument("poly")
    p_norm.add_argument("--gen", choices=tuple(_GEN_KINDS), default="semicircular")
    p_norm.add_argument("--qmax", type=int, default=12)
    p_norm.add_argument("--r", type=int, default=None,
                        help="left-leg generator count (default: all generators "
                             "single-leg)")

    p_dorb = sub.add_parser("dorb", help="orbit distance between two tuples on disk")
    p_dorb.add_argument("file_a", type=Path)
    p_dorb.add_argument("file_b", type=Path)
    p_dorb.add_argument("--exact", action="store_true",
                        help="exact single-Hermitian-pair distance")
    p_dorb.add_argument("--restarts", type=int, default=8)
    p_dorb.add_argument("--seed", type=int, default=0)

    p_rep = sub.add_parser("report", help="re-emit tables and figures from a run.json")
    p_rep.add_argument("record", type=Path)
    p_rep.add_argument("--out", type=Path, default=None)
    p_rep.add_argument("--format", choices=("csv", "both"), default="csv")
    p_rep.add_argument("--no-plots", action="store_true")
    return top


def _cmd_run(args) -> int:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
    sid = canonical_id(overrides.pop("id", args.scenario))
    spec = ScenarioSpec(sid, overrides)
    record = run_scenario(spec, workers=args.workers, seed=args.seed)
    out_dir = args.out / sid
    written = emit(record, args.format, out_dir)
    if not args.no_plots:
        from . import plots

        written += plots.render_record(record, out_dir)
    for path in written:
        print(path)
    return 0


def _cmd_oracle_moment(args) -> int:
    word = parse_monomial(args.word)
    top = max((let.index for let in word), default=1)
    spec = GeneratorSpec(_GEN_KINDS[args.gen], top)
    value = freeprob.poly_moment(NcPoly.from_monomial(word), spec)
    if abs(value.imag) < 1e-14:
        print(f"{value.real:.12g}")
    else:
        print(f"{value.real:.12g}{value.imag:+.12g}i")
    return 0


def _cmd_oracle_norm(args) -> int:
    poly = parse(args.poly)
    top = max(poly.max_generator_index(), 1)
    r = args.r if args.r is not None else top
    if top > 2 * r:
        print(f"error: polynomial uses T{top} but --r {r} allows at most T{2*r}",
              file=sys.stderr)
        return 2
    spec = GeneratorSpec(_GEN_KINDS[args.gen], r)
    try:
        result = freeprob.limit_norm(poly, spec, args.qmax)
    except freeprob.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for q, raw in enumerate(result.raw_lower_bounds, start=1):
        print(f"q={q:2d}  moment={result.moments[q-1]:.12g}  lower_bound={raw:.12g}")
    print(f"extrapolated={result.extrapolated:.12g}")
    return 0


def _cmd_dorb(args) -> int:
    a = load_mat_tuple(args.file_a)
    b = load_mat_tuple(args.file_b)
    if args.exact:
        if a.r != 1 or b.r != 1:
            print("error: --exact needs single-coordinate tuples", file=sys.stderr)
            return 2
        value = orbit.dorb_exact_herm1(a[0], b[0])
        print(f"dorb_exact={value:.12g}")
        return 0
    from .ensembles import SeedSpec

    res = orbit.dorb_upper(a, b, restarts=args.restarts,
                           seed=SeedSpec(args.seed))
    lower = orbit.dorb_lower(a, b)
    print(f"dorb_upper={res.value:.12g}")
    print(f"dorb_lower={lower:.12g}")
    print(f"certified={res.certified}")
    print(f"restarts={res.restarts_used}")
    return 0


def _cmd_report(args) -> int:
    record = RunRecord.load_json(args.record)
    out_dir = args.out or args.record.parent
    written = emit(record, args.format, out_dir)
    if not args.no_plots:
        from . import plots

        written += plots.render_record(record, out_dir)
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "oracle":
        if args.oracle_command == "moment":
            return _cmd_oracle_moment(args)
        return _cmd_oracle_norm(args)
    if args.command == "dorb":
        return _cmd_dorb(args)
    if args.command == "report":
        return _cmd_report(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
