"""Preference matrices and the ground-truth quantities derived from them.

A preference matrix ``p`` holds ``p[i, j]``, the probability that arm ``i``
wins a duel against arm ``j``. All indices are 0-based here; reports and
files meant for people use 1-based arm labels.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadEpsilon,
    BadN,
    ComplementViolation,
    DegenerateGap,
    DiagonalNotHalf,
    EntryOutOfRange,
    IndexOutOfRange,
    InvalidPermutation,
    NonSquare,
)

TOL = 1e-9
TIE_TOL = 1e-12


@dataclass(frozen=True)
class PreferenceMatrix:
    """Validated, read-only matrix of pairwise win probabilities."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def __getitem__(self, idx):
        return self.p[idx]

    def __eq__(self, other):
        if not isinstance(other, PreferenceMatrix):
            return NotImplemented
        return self.p.shape == other.p.shape and bool(np.array_equal(self.p, other.p))

    def __hash__(self):
        return hash(self.p.tobytes())

    def _check_arm(self, *arms: int) -> None:
        for a in arms:
            if not 0 <= a < self.n:
                raise IndexOutOfRange(f"arm {a} outside [0, {self.n})")


@dataclass(frozen=True)
class BordaProfile:
    scores: np.ndarray
    winner: int
    gaps: np.ndarray
    unique_winner: bool


@dataclass(frozen=True)
class SparsityReport:
    arm: int
    k: int
    omega_star: tuple[int, ...]
    gamma_observed: float
    gamma: float
    satisfied: bool
    partial_gap: float = field(default=float("nan"))


def validate(raw, tol: float = TOL) -> PreferenceMatrix:
    """Check ``raw`` strictly and wrap it; nothing is symmetrized."""
    p = np.asarray(raw, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {p.shape}")
    n = p.shape[0]
    if n < 2:
        raise NonSquare("need at least 2 arms")
    if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
        raise EntryOutOfRange("entries must lie in [0, 1]")
    diag = np.diag(p)
    if np.any(np.abs(diag - 0.5) > tol):
        bad = int(np.argmax(np.abs(diag - 0.5)))
        raise DiagonalNotHalf(f"p[{bad}][{bad}] = {diag[bad]!r}, expected 0.5")
    err = np.abs(p + p.T - 1.0)
    np.fill_diagonal(err, 0.0)
    if np.any(err > tol):
        i, j = np.unravel_index(int(np.argmax(err)), err.shape)
        raise ComplementViolation(
            f"p[{i}][{j}] + p[{j}][{i}] = {p[i, j] + p[j, i]!r}, expected 1"
        )
    return PreferenceMatrix(p)


def borda_profile(P: PreferenceMatrix) -> BordaProfile:
    n = P.n
    p = P.p
    scores = (p.sum(axis=1) - np.diag(p)) / (n - 1)
    winner = int(np.argmax(scores))
    ordered = np.sort(scores)[::-1]
    unique = bool(ordered[0] - ordered[1] > TIE_TOL)
    return BordaProfile(scores=scores, winner=winner, gaps=scores[winner] - scores,
                        unique_winner=unique)


def condorcet_winner(P: PreferenceMatrix) -> int | None:
    """Arm beating every other arm with probability strictly above 1/2."""
    beats = P.p > 0.5
    np.fill_diagonal(beats, True)
    rows = np.flatnonzero(beats.all(axis=1))
    return int(rows[0]) if rows.size else None


def _others(n: int, i: int, j: int) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[[i, j]] = False
    return mask


def _omega_mask(n: int, i: int, j: int, omega: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter(omega, dtype=int)
    if idx.size:
        mask[idx] = True
    mask[[i, j]] = False
    return mask


def partial_gap_delta(P: PreferenceMatrix, i: int, j: int, omega: Iterable[int]) -> float:
    P._check_arm(i, j)
    p = P.p
    mask = _omega_mask(P.n, i, j, omega)
    return float(2.0 * (p[i, j] - 0.5) + np.sum(p[i, mask] - p[j, mask]))


def partial_gap_nabla(P: PreferenceMatrix, i: int, j: int, omega: Iterable[int]) -> float:
    P._check_arm(i, j)
    p = P.p
    mask = _omega_mask(P.n, i, j, omega)
    return float(np.sum(np.abs(p[i, mask] - p[j, mask])))


def _ranked_others(P: PreferenceMatrix, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices outside {i, j} by descending discrepancy (stable: low index first)."""
    cand = np.flatnonzero(_others(P.n, i, j))
    disc = np.abs(P.p[i, cand] - P.p[j, cand])
    order = np.argsort(-disc, kind="stable")
    return cand[order], disc[order]


def top_k_omega(P: PreferenceMatrix, i: int, j: int, k: int) -> tuple[int, ...]:
    """The ``min(k, n-2)`` opponents where rows ``i`` and ``j`` differ most."""
    P._check_arm(i, j)
    if k < 0:
        raise ValueError("k must be non-negative")
    ranked, _ = _ranked_others(P, i, j)
    return tuple(int(w) for w in ranked[:k])


def sparsity_report(P: PreferenceMatrix, i: int, k: int, gamma: float,
                    winner: int) -> SparsityReport:
    """Measure how far arm ``i``'s row differences from ``winner`` are from k-sparse.

    The observed ratio is the largest mass of ``k`` discrepancies outside the
    top-``k`` set, relative to the partial gap over that set. A non-positive
    partial gap gives ``satisfied=False`` and an infinite ratio;
    :func:`require_sparsity` raises instead.
    """
    P._check_arm(i, winner)
    if i == winner:
        raise ValueError("arm must differ from the winner")
    ranked, disc = _ranked_others(P, winner, i)
    kk = min(k, P.n - 2)
    omega = tuple(int(w) for w in ranked[:kk])
    gap = partial_gap_delta(P, winner, i, omega)
    rest = float(np.sum(disc[kk:kk + k]))
    if gap <= 0:
        return SparsityReport(i, k, omega, float("inf"), gamma, False, gap)
    ratio = rest / gap
    return SparsityReport(i, k, omega, ratio, gamma, bool(ratio <= gamma), gap)


def require_sparsity(P: PreferenceMatrix, i: int, k: int, gamma: float,
                     winner: int) -> SparsityReport:
    rep = sparsity_report(P, i, k, gamma, winner)
    if rep.partial_gap <= 0:
        raise DegenerateGap(f"partial gap of arm {i} over its top-{k} set is {rep.partial_gap}")
    return rep


def discrepancy_curve(P: PreferenceMatrix, i: int, winner: int) -> np.ndarray:
    P._check_arm(i, winner)
    _, disc = _ranked_others(P, winner, i)
    return disc


def alpha_curve(P: PreferenceMatrix, i: int, winner: int) -> np.ndarray:
    """Partial gaps of ``winner`` over ``i`` as the comparison set grows.

    Entry ``k`` uses the ``k`` largest-discrepancy opponents; entry 0 is the
    direct-duel term alone and the last entry the full Borda gap times n-1.
    """
    P._check_arm(i, winner)
    if i == winner:
        raise ValueError("arm must differ from the winner")
    p = P.p
    ranked, _ = _ranked_others(P, winner, i)
    signed = p[winner, ranked] - p[i, ranked]
    head = 2.0 * (p[winner, i] - 0.5)
    return head + np.concatenate([[0.0], np.cumsum(signed)])


def _check_generator_args(n: int, eps: float) -> None:
    if int(n) != n or n < 4:
        raise BadN(f"n must be an integer >= 4, got {n}")
    if not 0 < eps < 0.25:
        raise BadEpsilon(f"eps must lie in (0, 1/4), got {eps}")


def gen_p1(n: int, eps: float) -> PreferenceMatrix:
    """Easy instance: rows 1 and 2 differ only against the last arm."""
    _check_generator_args(n, eps)
    p = np.full((n, n), 0.5)
    p[:2, 2:] = 0.75
    p[2:, :2] = 0.25
    p[0, n - 1] = 0.75 + eps
    p[n - 1, 0] = 0.25 - eps
    return validate(p, tol=TIE_TOL)


def gen_p2(n: int, eps: float) -> PreferenceMatrix:
    """Hard instance: the top two rows differ by eps/(n-1) in every column."""
    _check_generator_args(n, eps)
    e = eps / (n - 1)
    p = np.full((n, n), 0.5)
    p[:2, 2:] = 0.75
    p[2:, :2] = 0.25
    p[0, 1:] += e
    p[1:, 0] -= e
    return validate(p, tol=TIE_TOL)


def permute(P: PreferenceMatrix, sigma: Sequence[int]) -> PreferenceMatrix:
    """Relabel arms so that old arm ``i`` becomes ``sigma[i]``."""
    s = np.asarray(sigma)
    if s.shape != (P.n,) or not np.array_equal(np.sort(s), np.arange(P.n)):
        raise InvalidPermutation(f"not a permutation of range({P.n}): {sigma!r}")
    inv = np.argsort(s)
    return PreferenceMatrix(P.p[np.ix_(inv, inv)])


def random_matrix(n: int, rng: np.random.Generator, low: float = 0.0,
                  high: float = 1.0) -> PreferenceMatrix:
    """Uniformly random upper triangle on ``[low, high]``, complemented below."""
    p = np.full((n, n), 0.5)
    iu = np.triu_indices(n, 1)
    p[iu] = rng.uniform(low, high, size=len(iu[0]))
    p[(iu[1], iu[0])] = 1.0 - p[iu]
    return PreferenceMatrix(p)


def load_csv(path) -> PreferenceMatrix:
    raw = np.loadtxt(path, delimiter=",", ndmin=2)
    return validate(raw)


def save_csv(P: PreferenceMatrix, path) -> None:
    np.savetxt(path, P.p, delimiter=",", fmt="%.17g")


def to_json(P: PreferenceMatrix) -> dict:
    prof = borda_profile(P)
    return {"n": P.n, "p": P.p.tolist(), "scores": prof.scores.tolist(),
            "winner": prof.winner + 1}


def save_json(P: PreferenceMatrix, path) -> None:
    Path(path).write_text(json.dumps(to_json(P), indent=2))
