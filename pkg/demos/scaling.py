"""
Duels needed on the P1 family
=============================

P1 hides the winner's edge over the runner-up in a single column, so the
Borda gap shrinks like 1/n. Borda reduction pays for that with about n^2
duels. SECS compares arms on their most discriminative column instead.
"""

import numpy as np

from sparse_duel import experiments as ex

# A small sweep: 8 trials per point keeps this under a minute.
spec = ex.SweepSpec(matrix="p1", eps=0.2, algorithms=("secs", "br"),
                    n_values=(10, 20, 30), k_values=(1,), trials=8,
                    delta=0.1, elim_const=0.5, seed=1)
rows = ex.run_sweep(spec)
summary = ex.summarize(rows, spec)

print(f"{'n':>4} {'SECS':>12} {'BR':>12} {'ratio':>7}")
for n in spec.n_values:
    secs = ex.mean_tau(summary, "secs", n, 1)
    br = ex.mean_tau(summary, "br", n)
    print(f"{n:>4} {secs:>12.0f} {br:>12.0f} {br / secs:>7.1f}")

# Slopes of log(mean duels) against log(n)
for s in summary["slopes"]:
    print(f"{s['algorithm']:>5} slope {s['slope']:.2f}")

print("errors:", summary["total_errors"])
print("elim_const below 6 voids the formal guarantee:", summary["guarantee_voided"])
