"""Command-line front end.

Subcommands: gen, truth, scout, contour, solve, bench, report.
Exit codes: 0 success, 2 input error, 3 solver error, 4 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import STRATEGIES, BenchConfig, BenchReport, run_pipeline, run_sensitivity
from .contours import construct_contours, contours_from_json, contours_to_json, random_contours
from .errors import (
    CieigError,
    ConvergenceError,
    FormatError,
    NoEigenvaluesFound,
    ParameterError,
    RankZeroError,
    SingularShiftError,
    ValidationError,
    VersionError,
)
from .predictions import load_prediction, noisy_oracle_predict, ritz_as_prediction, write_prediction
from .problems import (
    Grid2D,
    assemble_em_cavity,
    assemble_plate,
    assemble_thermal,
    dense_ground_truth,
    grf_sample,
    read_dataset,
    target_count,
    write_dataset,
)
from .scouting import SCOUT_METHODS, calibrate_margin, scout, scout_contour
from .solvers import SolverConfig, solve_multi, write_eigenvectors

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4

_SOLVER_ERRORS = (NoEigenvaluesFound, ConvergenceError, SingularShiftError,
                  RankZeroError)
_VALIDATION_ERRORS = (ValidationError, VersionError)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cieig",
                                description="contour-integral eigensolver toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a dataset")
    g.add_argument("--problem", choices=("thermal", "plate", "em"),
                   required=True)
    g.add_argument("--grid", type=int, required=True,
                   help="interior nodes per axis")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--mean", type=float, default=1.0)
    g.add_argument("--variance", type=float, default=0.1)
    g.add_argument("--length-scale", type=float, default=0.2)

    t = sub.add_parser("truth", help="attach dense ground truth to a dataset")
    t.add_argument("--in", dest="path", required=True)
    t.add_argument("--m-frac", type=float, default=0.01)

    s = sub.add_parser("scout", help="Krylov spectrum estimate")
    s.add_argument("--in", dest="path", required=True)
    s.add_argument("--method", choices=SCOUT_METHODS, default="lanczos")
    s.add_argument("--k", type=int, default=60)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="prediction JSON output path")

    c = sub.add_parser("contour", help="build integration contours")
    c.add_argument("--in", dest="path", required=True)
    c.add_argument("--strategy", choices=("kde", "scout", "random"),
                   default="kde")
    c.add_argument("--pred", help="prediction JSON (kde strategy)")
    c.add_argument("--nmin", type=int, default=10)
    c.add_argument("--nmax", type=int, default=50)
    c.add_argument("--w", type=float, default=10.0)
    c.add_argument("--margin", type=float, default=0.5)
    c.add_argument("--scout-method", choices=SCOUT_METHODS, default="lanczos")
    c.add_argument("--k", type=int, default=60)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="contours JSON output path")

    v = sub.add_parser("solve", help="contour-integral solve")
    v.add_argument("--in", dest="path", required=True)
    v.add_argument("--contours", required=True, help="contours JSON file")
    v.add_argument("--solver", choices=("cirr", "feast"), default="cirr")
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--nq", type=int, default=32)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="result JSON output path")
    v.add_argument("--vectors", help="eigenvector binary output path")

    b = sub.add_parser("bench", help="strategy sweep on datasets")
    b.add_argument("--in", dest="paths", nargs="+", required=True)
    b.add_argument("--strategies", default="deepcontour,scout-lanczos,random,oracle-kde")
    b.add_argument("--tols", default="1e-2,1e-4,1e-7,1e-10,1e-12")
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--k", type=int, default=60)
    b.add_argument("--pred", help="prediction JSON for strategy deepcontour")
    b.add_argument("--out", required=True, help="report JSON output path")

    r = sub.add_parser("report", help="emit CSV + JSON from a report")
    r.add_argument("--in", dest="path", required=True, help="report JSON")
    r.add_argument("--csv", required=True)
    r.add_argument("--json", dest="json_out", required=True)
    return p


def _cmd_gen(args) -> int:
    grid = Grid2D(args.grid, args.grid)
    fld = grf_sample(grid, args.mean, args.variance, args.length_scale,
                     args.seed)
    if args.problem == "thermal":
        pencil = assemble_thermal(fld, c=1.0)
    elif args.problem == "em":
        pencil = assemble_em_cavity(fld, mu=1.0)
    else:
        pencil = assemble_plate(fld, bending_d=1.0, thickness_h=0.01)
    write_dataset(args.out, pencil, fld)
    print(f"wrote {args.problem} dataset (n={pencil.n}) to {args.out}")
    return EXIT_OK


def _cmd_truth(args) -> int:
    pencil, fld, _ = read_dataset(args.path)
    m = max(4, round(args.m_frac * pencil.n))
    truth = dense_ground_truth(pencil, m)
    write_dataset(args.path, pencil, fld, truth)
    print(f"computed {m} eigenvalues, span "
          f"[{truth.eigenvalues[0]:.6g}, {truth.eigenvalues[-1]:.6g}]")
    return EXIT_OK


def _cmd_scout(args) -> int:
    pencil, _, truth = read_dataset(args.path)
    m = truth.m if truth is not None else target_count(pencil.n)
    ritz = scout(pencil, args.method, args.k, m, args.seed)
    pred = ritz_as_prediction(ritz, pencil.problem_id)
    if args.out:
        write_prediction(args.out, pred)
        print(f"wrote {pred.m} Ritz values to {args.out}")
    else:
        print(json.dumps({"values": pred.values.tolist()}))
    return EXIT_OK


def _cmd_contour(args) -> int:
    pencil, _, truth = read_dataset(args.path)
    if args.strategy == "kde":
        if args.pred:
            pred = load_prediction(args.pred)
        elif truth is not None:
            pred = noisy_oracle_predict(truth.eigenvalues, 0.01, args.seed,
                                        pencil.problem_id)
        else:
            raise FormatError("kde strategy needs --pred or dataset truth")
        _, contours = construct_contours(pred, args.nmin, args.nmax, args.w,
                                         args.margin)
    elif args.strategy == "scout":
        m = truth.m if truth is not None else target_count(pencil.n)
        ritz = scout(pencil, args.scout_method, args.k, m, args.seed)
        mf = calibrate_margin(ritz, truth) if truth is not None else 1.2
        contours = [scout_contour(ritz, mf)]
    else:
        if truth is None:
            raise FormatError("random strategy needs dataset truth")
        contours = random_contours(truth.eigenvalues, args.seed)
    text = contours_to_json(contours)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {len(contours)} contours to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _cmd_solve(args) -> int:
    pencil, _, _ = read_dataset(args.path)
    with open(args.contours) as fh:
        contours = contours_from_json(fh.read())
    cfg = SolverConfig(n_q=args.nq, tol=args.tol)
    multi = solve_multi(pencil, contours, cfg, solver=args.solver,
                        seed=args.seed)
    if all(r is None for r in multi.results):
        raise multi.errors[0]
    if args.vectors:
        blocks = [r.eigenvectors for r in multi.results if r is not None]
        write_eigenvectors(args.vectors, np.hstack(blocks))
    doc = multi.to_json_dict()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        print(f"found {len(doc['eigenvalues'])} eigenvalues; "
              f"wrote {args.out}")
    else:
        print(json.dumps(doc))
    return EXIT_OK


def _cmd_bench(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGIES:
            raise ParameterError(f"unknown strategy {s!r}")
    tols = [float(t) for t in args.tols.split(",") if t.strip()]
    cfg = BenchConfig(scout_k=args.k, prediction_path=args.pred)
    records = []
    for path in args.paths:
        for strat in strategies:
            for tol in tols:
                for seed in range(args.seeds):
                    records.append(run_pipeline(path, strat, tol, cfg, seed))
    report = BenchReport(records=records)
    report.write_json(args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    report = BenchReport.from_json(args.path)
    report.write_csv(args.csv)
    report.write_json(args.json_out)
    print(f"wrote {args.csv} and {args.json_out}")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "truth": _cmd_truth,
    "scout": _cmd_scout,
    "contour": _cmd_contour,
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except _VALIDATION_ERRORS as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CieigError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
