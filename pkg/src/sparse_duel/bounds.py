"""Confidence radii, sample-complexity bounds and Bernoulli KL helpers."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateGap, DomainError, NoSolution
from .preference import PreferenceMatrix, borda_profile


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def confidence_radius(n: int, t, delta: float):
    """Bernstein radius for the n/t-scaled pairwise estimators after ``t`` rounds.

    Vectorized over ``t``.
    """
    _check_delta(delta)
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise DomainError("t must be >= 1")
    log_term = np.log(4.0 * n * n * t * t / delta)
    scaled = t / n
    c = np.sqrt(2.0 * log_term / scaled) + 2.0 * log_term / (3.0 * scaled)
    return float(c) if c.ndim == 0 else c


def borda_radius(n: int, t, delta: float):
    """Radius of the Borda-score elimination test (Hoeffding over ``t`` rounds)."""
    _check_delta(delta)
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise DomainError("t must be >= 1")
    r = n / (n - 1) * np.sqrt(2.0 * np.log(4.0 * n * t * t / delta) / t)
    return float(r) if r.ndim == 0 else r


def gate_from_R(n: int, R: float, delta: float) -> float:
    """Round count after which every arm with Borda gap >= R is gone."""
    _check_delta(delta)
    if not 0 < R <= 1:
        raise DomainError(f"R must lie in (0, 1], got {R}")
    return 32.0 / R**2 * math.log(32.0 * n / delta / R**2)


def R_from_gate(n: int, t0: float, delta: float, lo: float = 1e-9) -> float:
    """Invert :func:`gate_from_R` by bisection (relative tolerance 1e-10)."""
    _check_delta(delta)
    if not t0 > 0:
        raise DomainError("T0 must be positive")
    f_hi = gate_from_R(n, 1.0, delta)
    if t0 < f_hi:
        raise NoSolution(f"T0={t0} below the smallest attainable gate {f_hi:.6g} (R=1)")
    if t0 > gate_from_R(n, lo, delta):
        raise NoSolution(f"T0={t0} needs R below {lo}")
    if t0 == f_hi:
        return 1.0
    return bisect(lambda r: gate_from_R(n, r, delta) - t0, lo, 1.0,
                  xtol=1e-300, rtol=1e-10, maxiter=500)


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), natural log."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    out = 0.0
    if p > 0:
        out += p * math.log(p / q)
    if p < 1:
        out += (1 - p) * math.log((1 - p) / (1 - q))
    return out


def kl_upper_bound(p: float, q: float) -> float:
    """Chi-square style upper bound ``(p-q)^2 / (q(1-q))`` on the Bernoulli KL."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return (p - q) ** 2 / (q * (1 - q))


@dataclass(frozen=True)
class LowerBound:
    value: float
    """Expected-duel bound with C = 1/40 and the ((n-2)/(n-1))^2 factor."""
    value_main: float
    """Variant with C = 1/90 and no (n-2)/(n-1) factor."""
    inverse_gap_sum: float
    in_range: bool
    """Whether all off-diagonal entries lie in [3/8, 5/8]."""


def _gaps_or_raise(P: PreferenceMatrix) -> tuple[int, np.ndarray]:
    prof = borda_profile(P)
    if not prof.unique_winner:
        raise DegenerateGap("Borda winner is not unique")
    others = np.delete(np.arange(P.n), prof.winner)
    return prof.winner, prof.gaps[others]


def lower_bound_duels(P: PreferenceMatrix, delta: float) -> LowerBound:
    """Minimum expected number of duels any delta-PAC algorithm needs on ``P``.

    Outside the entry range [3/8, 5/8] or for delta > 0.15 the formula is
    still evaluated but a warning is issued, since the guarantee lapses.
    """
    _check_delta(delta)
    n = P.n
    off = P.p[~np.eye(n, dtype=bool)]
    in_range = bool(off.min() >= 3 / 8 - 1e-12 and off.max() <= 5 / 8 + 1e-12)
    if not in_range:
        warnings.warn("entries outside [3/8, 5/8]; lower bound not guaranteed", stacklevel=2)
    if delta > 0.15:
        warnings.warn("delta > 0.15; lower bound not guaranteed", stacklevel=2)
    _, gaps = _gaps_or_raise(P)
    inv = float(np.sum(1.0 / gaps**2))
    log_term = math.log(1.0 / (2.0 * delta))
    value = ((n - 2) / (n - 1)) ** 2 * inv * log_term / 40.0
    return LowerBound(value=value, value_main=inv * log_term / 90.0,
                      inverse_gap_sum=inv, in_range=in_range)


def theorem2_sample_bound(P: PreferenceMatrix, k: int, R: float, delta: float,
                          c: float = 1.0) -> float:
    """Upper bound on SECS duels, up to the unspecified absolute constant ``c``."""
    _check_delta(delta)
    if R <= 0:
        raise DomainError("R must be positive")
    n = P.n
    _, gaps = _gaps_or_raise(P)
    g2 = gaps**2
    borda_term = np.log(n / (delta * g2)) / g2
    gate_term = math.log(n / (delta * R**2)) / R**2
    sparse_term = (k + 1) ** 2 / n * borda_term
    per_arm = np.minimum(np.maximum(gate_term, sparse_term), borda_term)
    return float(c * per_arm.sum())
