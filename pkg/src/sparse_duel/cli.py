"""Command-line entry point: ``sparse-duel <command> ...``.

Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds
from . import experiments as ex
from . import preference as pm
from . import ranking
from .algorithms import RunConfig, run_borda_reduction, run_known_permutation_p1, run_secs
from .errors import DegenerateGap, NoComparablePairs, PhaseOneAmbiguity, SparseDuelError
from .oracle import DuelOracle

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_RUNTIME_ERRORS = (DegenerateGap, PhaseOneAmbiguity, NoComparablePairs)


def _t0(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {text!r}") from None
    if value < 0 or value != int(value):
        raise argparse.ArgumentTypeError("t0 must be a non-negative integer or 'inf'")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _matrix_args(p: argparse.ArgumentParser, n_default=10) -> None:
    p.add_argument("--matrix", default="p1", help="p1, p2 or file:<path> (CSV or JSON)")
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--n", type=int, default=n_default)


def _algo_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--t0", type=_t0, default=0.0, help="time gate: integer or 'inf'")
    p.add_argument("--elim-const", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparse-duel",
                                     description="Borda winner identification experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over n (or k), CSV rows + JSON summary")
    p.add_argument("--matrix", default="p1")
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--n", type=_int_list, default=[10, 20, 30, 40], help="e.g. 10,20,30")
    p.add_argument("--k", type=_int_list, default=[5], help="sparsity levels, e.g. 1,3,5")
    p.add_argument("--algorithms", default="secs,br", help="subset of secs,br,known-perm")
    p.add_argument("--trials", type=int, default=25)
    _algo_args(p)
    p.add_argument("--max-rounds", type=int, default=10**8)
    p.add_argument("--out", help="CSV path; the summary goes to <out>.summary.json")
    p.add_argument("--no-wall-time", action="store_true", help="omit the wall_time column")

    p = sub.add_parser("run", help="single trial with an elimination trace")
    _matrix_args(p)
    p.add_argument("--algorithm", choices=ex.ALGORITHMS, default="secs")
    p.add_argument("--k", type=int, default=5)
    _algo_args(p)
    p.add_argument("--out", help="write the RunResult JSON here")

    p = sub.add_parser("curves", help="export alpha and discrepancy curves")
    _matrix_args(p)
    p.add_argument("--winner", type=int, help="1-based arm to use as the reference")
    p.add_argument("--sample-arms", type=int, help="export this many random arms only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("bounds", help="lower bound and sparse upper bound for a matrix")
    _matrix_args(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--R", type=float, help="Borda-gap scale (default: from --t0)")
    p.add_argument("--t0", type=float, help="time gate to convert into R")
    p.add_argument("--c", type=float, default=1.0, help="absolute constant of the upper bound")
    p.add_argument("--out")

    p = sub.add_parser("build-matrix", help="preference matrix from a ranking dataset")
    p.add_argument("dataset")
    p.add_argument("--samples", type=int, default=10_000, help="duels per feature pair")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclude-arm", type=int, action="append", default=[],
                   help="1-based feature to drop; repeatable")
    p.add_argument("--out", help="matrix CSV path")
    p.add_argument("--json", help="also write the matrix JSON export here")
    return parser


def cmd_sweep(args) -> int:
    spec = ex.SweepSpec(matrix=args.matrix, eps=args.eps,
                        algorithms=tuple(a for a in args.algorithms.split(",") if a),
                        n_values=tuple(args.n), k_values=tuple(args.k), trials=args.trials,
                        delta=args.delta, elim_const=args.elim_const, t0=args.t0,
                        seed=args.seed, max_rounds=args.max_rounds)
    rows = ex.run_sweep(spec)
    _write(ex.rows_to_csv(rows, timing=not args.no_wall_time), args.out)
    summary = ex.summarize(rows, spec)
    text = json.dumps(summary, indent=2)
    if args.out:
        Path(args.out).with_suffix(".summary.json").write_text(text)
    else:
        print(text, file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    P = ex.load_matrix(args.matrix, args.n, args.eps)
    oracle = DuelOracle(P, args.seed)
    if args.algorithm == "known-perm":
        res = run_known_permutation_p1(oracle, args.eps, args.delta)
    else:
        cfg = RunConfig(k=args.k, t0=args.t0, delta=args.delta, elim_const=args.elim_const,
                        seed=args.seed)
        res = (run_secs if args.algorithm == "secs" else run_borda_reduction)(oracle, cfg)
    for e in res.eliminations:
        print(f"round {e.round:>10d}  eliminated arm {e.arm + 1:>4d}  ({e.condition})")
    print(f"winner {res.winner + 1}  duels {res.tau}  rounds {res.rounds}  correct {res.correct}")
    if args.out:
        Path(args.out).write_text(json.dumps(res.to_dict(), indent=2))
    return 0


def cmd_curves(args) -> int:
    P = ex.load_matrix(args.matrix, args.n, args.eps)
    winner = None if args.winner is None else args.winner - 1
    arms = None
    if args.sample_arms:
        ref = winner if winner is not None else pm.borda_profile(P).winner
        pool = [i for i in range(P.n) if i != ref]
        rng = np.random.default_rng(args.seed)
        arms = sorted(rng.choice(pool, size=min(args.sample_arms, len(pool)), replace=False).tolist())
    _write(ex.curves_to_csv(ex.curve_rows(P, winner, arms)), args.out)
    return 0


def cmd_bounds(args) -> int:
    P = ex.load_matrix(args.matrix, args.n, args.eps)
    lb = bounds.lower_bound_duels(P, args.delta)
    if args.R is not None:
        R = args.R
    elif args.t0 is not None:
        R = bounds.R_from_gate(P.n, args.t0, args.delta)
    else:
        R = float(pm.borda_profile(P).gaps.max())
    ub = bounds.theorem2_sample_bound(P, args.k, R, args.delta, args.c)
    report = {
        "n": P.n, "delta": args.delta, "k": args.k, "R": R,
        "t0_for_R": bounds.gate_from_R(P.n, R, args.delta) if R <= 1 else None,
        "lower_bound": lb.value, "lower_bound_main": lb.value_main,
        "entries_in_range": lb.in_range, "upper_bound": ub, "upper_bound_constant": args.c,
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_build_matrix(args) -> int:
    ds = ranking.load_dataset(args.dataset)
    if args.exclude_arm:
        drop = [a - 1 for a in args.exclude_arm]
        if min(drop) < 0 or max(drop) >= ds.n_features:
            raise SparseDuelError(f"--exclude-arm outside 1..{ds.n_features}")
        ds = ds.drop_features(drop)
    rep = ranking.build_matrix(ds, args.samples, args.seed)
    P = rep.matrix
    if args.out:
        pm.save_csv(P, args.out)
    else:
        np.savetxt(sys.stdout, P.p, delimiter=",", fmt="%.17g")
    if args.json:
        pm.save_json(P, args.json)
    prof = pm.borda_profile(P)
    cw = pm.condorcet_winner(P)
    print(f"arms {P.n}  tie rate {rep.tie_rate:.4f}", file=sys.stderr)
    print(f"borda winner {prof.winner + 1}", file=sys.stderr)
    if cw is None:
        print("condorcet winner none", file=sys.stderr)
    else:
        rank = int(np.sum(prof.scores > prof.scores[cw])) + 1
        note = "same as borda" if cw == prof.winner else f"differs; borda rank {rank}"
        print(f"condorcet winner {cw + 1} ({note})", file=sys.stderr)
    return 0


COMMANDS = {"sweep": cmd_sweep, "run": cmd_run, "curves": cmd_curves,
            "bounds": cmd_bounds, "build-matrix": cmd_build_matrix}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (SparseDuelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
