"""Borda winner identification from noisy pairwise duels, exploiting comparison sparsity."""
from .algorithms import (
    AlgorithmState,
    Elimination,
    RunConfig,
    RunResult,
    run_borda_reduction,
    run_known_permutation_p1,
    run_secs,
)
from .bounds import (
    R_from_gate,
    confidence_radius,
    gate_from_R,
    kl_bernoulli,
    kl_upper_bound,
    lower_bound_duels,
    theorem2_sample_bound,
)
from .oracle import DuelOracle
from .preference import (
    PreferenceMatrix,
    alpha_curve,
    borda_profile,
    condorcet_winner,
    discrepancy_curve,
    gen_p1,
    gen_p2,
    partial_gap_delta,
    partial_gap_nabla,
    permute,
    sparsity_report,
    top_k_omega,
    validate,
)

__version__ = "0.1.0"
