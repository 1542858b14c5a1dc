"""Seeded Monte Carlo sweeps and curve exports behind the command line."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import preference as pm
from .algorithms import RunConfig, run_borda_reduction, run_known_permutation_p1, run_secs
from .errors import ConfigError, DegenerateWinner
from .oracle import RNG_ALGORITHM, DuelOracle, trial_seed

ALGORITHMS = ("secs", "br", "known-perm")
SWEEP_HEADER = ["algorithm", "n", "k", "trial", "seed", "tau", "rounds", "winner",
                "correct", "budget_exceeded", "wall_time"]
CURVE_HEADER = ["arm", "k", "alpha", "discrepancy"]
THREADS_ENV = "SPARSE_DUEL_THREADS"


def load_matrix(source: str, n: int | None = None, eps: float = 0.2) -> pm.PreferenceMatrix:
    """Resolve ``p1``, ``p2`` or ``file:<path>`` to a matrix."""
    if source == "p1":
        return pm.gen_p1(n, eps)
    if source == "p2":
        return pm.gen_p2(n, eps)
    if source.startswith("file:"):
        path = source[5:]
        if path.endswith(".json"):
            return pm.validate(json.loads(Path(path).read_text())["p"])
        return pm.load_csv(path)
    raise ConfigError(f"unknown matrix source {source!r}; use p1, p2 or file:<path>")


@dataclass
class SweepSpec:
    matrix: str = "p1"
    eps: float = 0.2
    algorithms: tuple[str, ...] = ("secs", "br")
    n_values: tuple[int, ...] = (10, 20, 30, 40)
    k_values: tuple[int, ...] = (5,)
    trials: int = 25
    delta: float = 0.1
    elim_const: float = 0.5
    t0: float = 0.0
    seed: int = 0
    max_rounds: int = 10**8
    workers: int | None = None

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        self.n_values = tuple(int(n) for n in self.n_values)
        self.k_values = tuple(int(k) for k in self.k_values)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ConfigError(f"unknown algorithms {sorted(bad)}; choose from {ALGORITHMS}")
        if "known-perm" in self.algorithms and self.matrix != "p1":
            raise ConfigError("known-perm runs only on the p1 matrix")
        if not self.k_values:
            raise ConfigError("k_values must not be empty")
        if self.matrix.startswith("file:"):
            self.n_values = (load_matrix(self.matrix).n,)
        elif not self.n_values:
            raise ConfigError("n_values must not be empty")
        RunConfig(k=max(self.k_values), t0=self.t0, delta=self.delta,
                  elim_const=self.elim_const, max_rounds=self.max_rounds)


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    n: int
    k: int | None
    trial: int
    seed: int
    tau: int
    rounds: int
    winner: int
    correct: bool | None
    budget_exceeded: bool
    wall_time: float = field(compare=False)

    def sort_key(self):
        return (self.algorithm, self.n, -1 if self.k is None else self.k, self.trial)


@dataclass(frozen=True)
class _Task:
    algorithm: str
    n: int
    k: int | None
    trial: int
    spec: SweepSpec


def _run_task(task: _Task) -> SweepRow:
    spec = task.spec
    seed = trial_seed(spec.seed, task.trial)
    P = load_matrix(spec.matrix, task.n, spec.eps)
    start = time.perf_counter()
    if task.algorithm == "known-perm":
        sigma = np.random.default_rng(np.random.SeedSequence([seed, 7])).permutation(P.n)
        res = run_known_permutation_p1(DuelOracle(pm.permute(P, sigma), seed), spec.eps, spec.delta)
    else:
        cfg = RunConfig(k=task.k if task.k is not None else 0, t0=spec.t0, delta=spec.delta,
                        elim_const=spec.elim_const, seed=seed, max_rounds=spec.max_rounds)
        run = run_secs if task.algorithm == "secs" else run_borda_reduction
        res = run(DuelOracle(P, seed), cfg)
    wall = time.perf_counter() - start
    return SweepRow(task.algorithm, P.n, task.k, task.trial, seed, res.tau, res.rounds,
                    res.winner + 1, res.correct, res.budget_exceeded, wall)


def _tasks(spec: SweepSpec) -> list[_Task]:
    out = []
    for alg in spec.algorithms:
        ks = spec.k_values if alg == "secs" else (None,)
        for n in spec.n_values:
            for k in ks:
                out.extend(_Task(alg, n, k, t, spec) for t in range(spec.trials))
    return out


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    tasks = _tasks(spec)
    workers = worker_count(spec.workers)
    if workers == 1:
        rows = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=1))
    return sorted(rows, key=SweepRow.sort_key)


def rows_to_csv(rows: list[SweepRow], timing: bool = True) -> str:
    header = SWEEP_HEADER if timing else SWEEP_HEADER[:-1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        d = asdict(r)
        d["k"] = "" if r.k is None else r.k
        d["correct"] = "" if r.correct is None else int(r.correct)
        d["budget_exceeded"] = int(r.budget_exceeded)
        d["wall_time"] = f"{r.wall_time:.6f}"
        w.writerow([d[h] for h in header])
    return buf.getvalue()


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def fit_loglog(n_values, taus) -> dict:
    """OLS slope of log(tau) on log(n), with its standard error."""
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.asarray(taus, dtype=float))
    if x.size < 2:
        return {"slope": None, "intercept": None, "stderr": None}
    fit = stats.linregress(x, y)
    se = float(fit.stderr) if x.size > 2 else None
    return {"slope": float(fit.slope), "intercept": float(fit.intercept), "stderr": se}


def summarize(rows, spec: SweepSpec | None = None) -> dict:
    """Per-point mean/std of tau, error counts and per-curve log-log slopes.

    Accepts :class:`SweepRow` objects or CSV dict rows.
    """
    groups: dict[tuple, list] = {}
    for r in rows:
        if isinstance(r, dict):
            alg, n, k = r["algorithm"], int(r["n"]), (int(r["k"]) if r["k"] != "" else None)
            tau, correct = int(r["tau"]), (None if r["correct"] == "" else bool(int(r["correct"])))
        else:
            alg, n, k, tau, correct = r.algorithm, r.n, r.k, r.tau, r.correct
        groups.setdefault((alg, n, k), []).append((tau, correct))
    points = []
    for (alg, n, k), vals in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], -1 if kv[0][2] is None else kv[0][2])):
        taus = np.array([v[0] for v in vals], dtype=float)
        points.append({
            "algorithm": alg, "n": n, "k": k, "trials": len(vals),
            "mean_tau": float(taus.mean()),
            "std_tau": float(taus.std(ddof=1)) if taus.size > 1 else 0.0,
            "errors": sum(1 for v in vals if v[1] is False),
        })
    slopes = []
    curves: dict[tuple, list] = {}
    for p in points:
        curves.setdefault((p["algorithm"], p["k"]), []).append(p)
    for (alg, k), pts in curves.items():
        pts = sorted(pts, key=lambda p: p["n"])
        fit = fit_loglog([p["n"] for p in pts], [p["mean_tau"] for p in pts])
        slopes.append({"algorithm": alg, "k": k, **fit})
    out = {"points": points, "slopes": slopes,
           "total_errors": sum(p["errors"] for p in points), "rng": RNG_ALGORITHM}
    if spec is not None:
        out["spec"] = asdict(spec)
        out["spec"]["t0"] = "inf" if math.isinf(spec.t0) else spec.t0
        out["guarantee_voided"] = spec.elim_const < 6
    return out


def slope_of(summary: dict, algorithm: str, k: int | None = None) -> float | None:
    for s in summary["slopes"]:
        if s["algorithm"] == algorithm and (k is None or s["k"] == k):
            return s["slope"]
    return None


def mean_tau(summary: dict, algorithm: str, n: int, k: int | None = None) -> float:
    for p in summary["points"]:
        if p["algorithm"] == algorithm and p["n"] == n and (k is None or p["k"] == k):
            return p["mean_tau"]
    raise KeyError((algorithm, n, k))


def curve_rows(P: pm.PreferenceMatrix, winner: int | None = None,
               arms=None) -> list[tuple[int, int, float, float | None]]:
    """Alpha and sorted-discrepancy curves, 1-based arms; discrepancy rank k for k >= 1."""
    if winner is None:
        prof = pm.borda_profile(P)
        if not prof.unique_winner:
            raise DegenerateWinner("Borda winner is tied; pass an explicit winner")
        winner = prof.winner
    if arms is None:
        arms = [i for i in range(P.n) if i != winner]
    rows = []
    for i in arms:
        alpha = pm.alpha_curve(P, i, winner)
        disc = pm.discrepancy_curve(P, i, winner)
        for k, a in enumerate(alpha):
            rows.append((i + 1, k, float(a), None if k == 0 else float(disc[k - 1])))
    return rows


def curves_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for arm, k, a, d in rows:
        w.writerow([arm, k, repr(a), "" if d is None else repr(d)])
    return buf.getvalue()
