"""Acceptance suite: one test per headline criterion, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
repeated under "acceptance criteria" at the end of the pytest report.
"""
import math
import sys
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from sparse_duel import bounds
from sparse_duel import experiments as ex
from sparse_duel import preference as pm
from sparse_duel import ranking
from sparse_duel.algorithms import RunConfig, run_borda_reduction, run_secs
from sparse_duel.oracle import DuelOracle

FIX = Path(__file__).parent / "fixtures"
MASTER = 20240611

SCALING = ex.SweepSpec(matrix="p1", eps=0.2, algorithms=("secs", "br"), n_values=(10, 20, 30, 40),
                       k_values=(1,), trials=25, delta=0.1, elim_const=0.5, t0=0.0, seed=MASTER)
KNOWN_PERM = ex.SweepSpec(matrix="p1", eps=0.2, algorithms=("known-perm",), n_values=(10, 20, 40, 80),
                          trials=100, delta=0.1, seed=MASTER)

# frozen from 30-digit mpmath evaluations of the closed forms
C_T_10_100 = 3.038022668827045
LB_N4 = 5.364793041447001
KL_075_05 = 0.13081203594113696
T0_20_025 = 5906.760699692823


@pytest.fixture(scope="module")
def scaling_rows():
    return ex.run_sweep(SCALING)


@pytest.fixture(scope="module")
def known_perm_rows():
    return ex.run_sweep(KNOWN_PERM)


def random_gap_matrix(rng, min_gap=0.15):
    while True:
        P = pm.random_matrix(int(rng.integers(3, 9)), rng, 0.05, 0.95)
        prof = pm.borda_profile(P)
        if np.delete(prof.gaps, prof.winner).min() >= min_gap:
            return P


@pytest.fixture(scope="module")
def random_gap_runs():
    rng = np.random.default_rng(np.random.SeedSequence([MASTER, 1]))
    cfg = RunConfig(k=1, t0=0, delta=0.05, elim_const=0.5)
    return [run_secs(DuelOracle(random_gap_matrix(rng), MASTER + s), cfg) for s in range(200)]


def test_scaling(scaling_rows, criterion):
    summary = ex.summarize(scaling_rows, SCALING)
    br, secs = ex.slope_of(summary, "br"), ex.slope_of(summary, "secs", 1)
    faster = {n: ex.mean_tau(summary, "secs", n, 1) < ex.mean_tau(summary, "br", n) for n in (20, 30, 40)}
    ok = 1.65 <= br <= 2.35 and 0.65 <= secs <= 1.35 and all(faster.values())
    ratios = ", ".join(f"n={n}: {ex.mean_tau(summary, 'br', n) / ex.mean_tau(summary, 'secs', n, 1):.1f}x"
                       for n in (10, 20, 30, 40))
    criterion("scaling", ok, f"slope BR {br:.3f} in [1.65, 2.35], SECS {secs:.3f} in [0.65, 1.35]; "
                             f"BR/SECS mean tau {ratios}")


def test_correctness(scaling_rows, random_gap_runs, criterion):
    p1_fail = sum(not r.correct for r in scaling_rows)
    rnd_fail = sum(not r.correct for r in random_gap_runs)
    total = len(scaling_rows) + len(random_gap_runs)
    rate = (p1_fail + rnd_fail) / total
    criterion("correctness", p1_fail == 0 and rate <= 0.05,
              f"P1 failures {p1_fail}/{len(scaling_rows)}, random-matrix failures "
              f"{rnd_fail}/{len(random_gap_runs)}, overall rate {rate:.4f} <= 0.05")


def test_baseline_equivalence(criterion):
    rng = np.random.default_rng(np.random.SeedSequence([MASTER, 2]))
    mismatches = 0
    for trial in range(50):
        P = pm.random_matrix(int(rng.integers(2, 11)), rng, 0.1, 0.9)
        seed = int(rng.integers(2**31))
        a = run_secs(DuelOracle(P, seed), RunConfig(k=2, t0=math.inf, delta=0.1, elim_const=0.5), record=True)
        b = run_borda_reduction(DuelOracle(P, seed), RunConfig(k=2, t0=0, delta=0.1, elim_const=0.5),
                                record=True)
        same = (a == b and a.to_dict() == b.to_dict()
                and np.array_equal(a.state.pair_sums, b.state.pair_sums)
                and len(a.history) == len(b.history)
                and all(np.array_equal(x, y) for ha, hb in zip(a.history, b.history)
                        for x, y in zip(ha, hb)))
        mismatches += not same
    criterion("baseline equivalence", mismatches == 0, f"{50 - mismatches}/50 (matrix, seed) pairs bit-identical")


def _lex_first_top_k(P, i, j, k):
    cand = [w for w in range(P.n) if w not in (i, j)]
    best, best_set = -1.0, ()
    for sub in combinations(cand, min(k, len(cand))):
        val = sum(abs(P.p[i, w] - P.p[j, w]) for w in sub)
        if val > best + 1e-12:
            best, best_set = val, sub
    return best_set


def _brute_gamma(P, winner, i, k):
    star = _lex_first_top_k(P, winner, i, k)
    rest = [w for w in range(P.n) if w not in (winner, i) and w not in star]
    worst = 0.0
    for size in range(k + 1):
        for sub in combinations(rest, min(size, len(rest))):
            worst = max(worst, sum(abs(P.p[winner, w] - P.p[i, w]) for w in sub))
    gap = 2 * (P.p[winner, i] - 0.5) + sum(P.p[winner, w] - P.p[i, w] for w in star)
    return star, (worst / gap if gap > 0 else math.inf)


def test_brute_force_oracles(criterion):
    rng = np.random.default_rng(np.random.SeedSequence([MASTER, 3]))
    instances, checks, bad = 0, 0, []
    for inst in range(120):
        n = int(rng.integers(3, 9))
        if inst % 2:
            P = pm.random_matrix(n, rng)
        else:  # coarse grid forces tied discrepancies
            p = np.full((n, n), 0.5)
            iu = np.triu_indices(n, 1)
            p[iu] = rng.integers(0, 9, size=len(iu[0])) / 8
            p[(iu[1], iu[0])] = 1 - p[iu]
            P = pm.validate(p)
        instances += 1
        winner = int(np.argmax(P.p.sum(axis=1)))
        for k in range(4):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    checks += 1
                    if set(pm.top_k_omega(P, i, j, k)) != set(_lex_first_top_k(P, i, j, k)):
                        bad.append(("omega", inst, i, j, k))
                if i == winner:
                    continue
                star, gamma = _brute_gamma(P, winner, i, k)
                rep = pm.sparsity_report(P, i, k, 1 / 3, winner)
                checks += 1
                same_gamma = (math.isinf(gamma) and math.isinf(rep.gamma_observed)) or \
                    abs(rep.gamma_observed - gamma) <= 1e-12 * max(1.0, abs(gamma))
                if set(rep.omega_star) != set(star) or not same_gamma:
                    bad.append(("gamma", inst, i, k))
    criterion("brute-force oracles", not bad and instances >= 100,
              f"{instances} matrices (n 3..8, k 0..3), {checks} comparisons, {len(bad)} mismatches")


def test_analytical_identities(criterion):
    rng = np.random.default_rng(np.random.SeedSequence([MASTER, 4]))
    worst = 0.0
    for _ in range(100):
        P = pm.random_matrix(int(rng.integers(2, 16)), rng)
        s = pm.borda_profile(P).scores
        for i in range(P.n):
            for j in range(P.n):
                if i != j:
                    d = pm.partial_gap_delta(P, i, j, range(P.n))
                    worst = max(worst, abs(d - (P.n - 1) * (s[i] - s[j])))
    grid = np.linspace(0.01, 0.99, 99)
    kl_ok = all(bounds.kl_bernoulli(p, q) <= bounds.kl_upper_bound(p, q) for p in grid for q in grid)
    self_kl = max(abs(bounds.kl_bernoulli(p, p)) for p in grid)
    ok = worst <= 1e-9 and kl_ok and self_kl <= 1e-12
    criterion("analytical identities", ok,
              f"max |Delta([n]) - (n-1)(s_i - s_j)| {worst:.1e}; kl <= bound on 99x99 grid: {kl_ok}; "
              f"max |d(p,p)| {self_kl:.1e}")


def test_bound_calculators(criterion):
    four = np.full((4, 4), 0.5)
    four[0, 1:], four[1:, 0] = 0.575, 0.425  # every Borda gap 0.1
    rel = {
        "C_t(10,100,0.1)": abs(bounds.confidence_radius(10, 100, 0.1) / C_T_10_100 - 1),
        "lower bound n=4": abs(bounds.lower_bound_duels(pm.validate(four), 0.1).value / LB_N4 - 1),
        "kl(0.75,0.5)": abs(bounds.kl_bernoulli(0.75, 0.5) / KL_075_05 - 1),
        "T0(20,0.25,0.1)": abs(bounds.gate_from_R(20, 0.25, 0.1) / T0_20_025 - 1),
    }
    trip = max(abs(bounds.R_from_gate(20, bounds.gate_from_R(20, R, 0.1), 0.1) / R - 1)
               for R in np.linspace(0.02, 0.9, 25))
    ok = max(rel.values()) <= 1e-6 and trip <= 1e-8
    criterion("bound calculators", ok,
              "; ".join(f"{k} rel err {v:.1e}" for k, v in rel.items()) + f"; gate round-trip {trip:.1e}")


def test_known_permutation(known_perm_rows, criterion):
    at40 = [r for r in known_perm_rows if r.n == 40]
    fail = sum(not r.correct for r in at40) / len(at40)
    slope = ex.slope_of(ex.summarize(known_perm_rows), "known-perm")
    ok = fail <= 0.1 and abs(slope - 1.0) <= 0.3
    criterion("known permutation", ok,
              f"failure rate at n=40 {fail:.2f} <= 0.1 over {len(at40)} trials; slope {slope:.3f} in [0.7, 1.3]")


def test_ingestion_oracle(criterion):
    ds = ranking.load_dataset(FIX / "five_queries.txt")
    S = 10_000
    m = ds.n_features
    exact = np.array([[0.5 if i == j else ranking.exact_duel_probability(ds, i, j) for j in range(m)]
                      for i in range(m)])
    est = ranking.build_matrix(ds, S, seed=MASTER).matrix.p
    z = np.abs(est - exact) / np.maximum(np.sqrt(exact * (1 - exact) / S), 1e-300)
    z[np.isclose(est, exact, rtol=0, atol=1e-15)] = 0.0
    criterion("ingestion oracle", bool(np.all(z <= 3)),
              f"{m * (m - 1) // 2} pairs over {ds.comparable_pairs().agree.shape[1]} enumerable pairs; "
              f"max |z| {z.max():.2f} <= 3 at {S} samples")


def test_determinism(scaling_rows, known_perm_rows, criterion):
    first = ex.rows_to_csv(scaling_rows, timing=False) + ex.rows_to_csv(known_perm_rows, timing=False)
    again = ex.rows_to_csv(ex.run_sweep(SCALING), timing=False) + \
        ex.rows_to_csv(ex.run_sweep(KNOWN_PERM), timing=False)
    criterion("determinism", first == again,
              f"scaling and known-permutation sweeps re-run: {len(first.encode())} CSV bytes identical")


def test_k_sweep_substitute(criterion):
    ds = ranking.load_dataset(FIX / "ten_features.txt")
    P = ranking.build_matrix(ds, 10_000, seed=MASTER).matrix
    ks = (1, 2, 4, 8)
    trials = 25
    mean = {}
    for k in ks:
        cfg = RunConfig(k=k, t0=0, delta=0.1, elim_const=0.5)
        mean[k] = np.mean([run_secs(DuelOracle(P, MASTER ^ t), cfg).tau for t in range(trials)])
    cfg = RunConfig(k=1, t0=0, delta=0.1, elim_const=0.5)
    br = np.mean([run_borda_reduction(DuelOracle(P, MASTER ^ t), cfg).tau for t in range(trials)])
    monotone = all(mean[a] <= mean[b] for a, b in zip(ks, ks[1:]))
    closer = abs(mean[ks[-1]] - br) < abs(mean[ks[0]] - br)
    criterion("k-sweep on a fixture-built matrix", monotone and closer,
              ", ".join(f"k={k}: {mean[k]:.0f}" for k in ks) + f", BR: {br:.0f}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
