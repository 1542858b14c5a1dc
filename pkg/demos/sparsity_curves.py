"""
How sparse is a comparison?
===========================

alpha_i(k) adds the k most telling columns to the head-to-head margin of
the winner over arm i. A curve that jumps early and then flattens means a
few columns carry the whole Borda gap.
"""

import numpy as np

from sparse_duel import preference as pm

P1 = pm.gen_p1(12, 0.2)
P2 = pm.gen_p2(12, 0.2)

for name, P in [("P1", P1), ("P2", P2)]:
    prof = pm.borda_profile(P)
    print(f"{name}: winner {prof.winner + 1}, runner-up gap {np.sort(prof.gaps)[1]:.4f}")
    for arm in (1, 2):
        alpha = pm.alpha_curve(P, arm, prof.winner)
        print(f"  arm {arm + 1} alpha(0..5):", np.round(alpha[:6], 3))

# The runner-up in P1 differs from the winner on one column only
rep = pm.sparsity_report(P1, 1, k=1, gamma=1 / 3, winner=0)
print("P1 arm 2:", "omega*", [w + 1 for w in rep.omega_star],
      "gamma", round(rep.gamma_observed, 4), "sparse" if rep.satisfied else "dense")

# In P2 every column carries the same small share: the ratio sits on 1/3 exactly,
# so any stricter gamma calls it dense
rep = pm.sparsity_report(P2, 1, k=1, gamma=0.3, winner=0)
print("P2 arm 2:", "gamma", round(rep.gamma_observed, 4), "sparse" if rep.satisfied else "dense")
