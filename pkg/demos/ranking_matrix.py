"""
Features as arms
================

Each ranking feature is an arm. Two features duel on a random document
pair; the one that orders the pair like the relevance labels wins, and a
fair coin settles the rest.
"""

from pathlib import Path

import numpy as np

from sparse_duel import preference as pm
from sparse_duel import ranking
from sparse_duel.algorithms import RunConfig, run_borda_reduction, run_secs
from sparse_duel.oracle import DuelOracle

here = Path(__file__).resolve().parent
ds = ranking.load_dataset(here.parent / "tests" / "fixtures" / "ten_features.txt")
print(f"{len(ds.queries)} queries, {ds.n_docs} documents, {ds.n_features} features")

report = ranking.build_matrix(ds, samples_per_pair=5000, seed=0)
P = report.matrix
print("tie rate", round(report.tie_rate, 3))

# Monte Carlo entries against exhaustive enumeration for the first row
exact = [ranking.exact_duel_probability(ds, 0, j) for j in range(1, P.n)]
print("row 1 estimate:", np.round(P.p[0, 1:], 3))
print("row 1 exact:   ", np.round(exact, 3))

prof = pm.borda_profile(P)
print("Borda winner", prof.winner + 1, "Condorcet winner", pm.condorcet_winner(P) + 1)

# SECS and Borda reduction on the built matrix
for k in (1, 3):
    res = run_secs(DuelOracle(P, 3), RunConfig(k=k, t0=0, delta=0.1, elim_const=0.5))
    print(f"SECS k={k}: winner {res.winner + 1}, {res.tau} duels")
res = run_borda_reduction(DuelOracle(P, 3), RunConfig(k=1, t0=0, delta=0.1, elim_const=0.5))
print(f"BR: winner {res.winner + 1}, {res.tau} duels")
