"""Successive elimination for the Borda winner, with and without comparison sparsity.

Each round draws one opponent uniformly from all ``n`` arms and duels every
active arm against it. From those outcomes two scaled estimators are kept:

* ``p_hat[j, i] = (n / t) * sum_l Z[j, I_l] * 1{I_l = i}``, unbiased for p[j, i]
* ``s_hat[j] = (n / (n - 1)) / t * sum_l Z[j, I_l]``, unbiased for the Borda score

An arm is eliminated when another active arm beats it on the Borda test, or
(after the time gate) when the partial gap over the top-k empirical
discrepancies exceeds ``elim_const * (k + 1) * C_t``.

Rounds are simulated in vectorized blocks. The block is cut at the first
round that eliminates anything; draws beyond it are discarded, which leaves
the law of the run unchanged because future rounds are independent of the
past.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds
from .errors import ConfigError, PhaseOneAmbiguity
from .oracle import RNG_ALGORITHM, DuelOracle
from .preference import borda_profile

log = logging.getLogger(__name__)

SPARSE = "sparse"
BORDA = "borda"

_MIN_BLOCK = 32
_MAX_ELEMS = 1 << 21


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one SECS run.

    ``t0`` is the round after which the sparse test switches on (``inf``
    disables it). Passing ``R`` instead derives the gate from the Borda-gap
    scale it guarantees to clear.
    """

    k: int = 5
    t0: float | None = 0.0
    R: float | None = None
    delta: float = 0.1
    elim_const: float = 6.0
    seed: int | None = None
    max_rounds: int = 10**8

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.k < 0 or int(self.k) != self.k:
            raise ConfigError(f"k must be a non-negative integer, got {self.k}")
        if not self.elim_const > 0:
            raise ConfigError("elim_const must be positive")
        if self.t0 is None and self.R is None:
            raise ConfigError("either t0 or R is required")
        if self.t0 is not None and self.t0 < 0:
            raise ConfigError("t0 must be non-negative")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be >= 1")

    def gate(self, n: int) -> float:
        if self.t0 is not None:
            return float(self.t0)
        return bounds.gate_from_R(n, self.R, self.delta)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t0"] = _jsonable(d["t0"])
        return d


def _jsonable(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    return x


@dataclass(frozen=True)
class Elimination:
    arm: int
    round: int
    condition: str


@dataclass
class AlgorithmState:
    """Running sums of one SECS run; rows freeze when an arm is eliminated."""

    n: int
    t: int = 0
    active: np.ndarray = None
    pair_sums: np.ndarray = None
    eliminations: list[Elimination] = field(default_factory=list)

    def __post_init__(self):
        if self.active is None:
            self.active = np.arange(self.n)
        if self.pair_sums is None:
            self.pair_sums = np.zeros((self.n, self.n), dtype=np.int64)

    @property
    def win_sums(self) -> np.ndarray:
        return self.pair_sums.sum(axis=1)

    def p_hat(self) -> np.ndarray:
        return self.n * self.pair_sums / max(self.t, 1)

    def s_hat(self) -> np.ndarray:
        return self.n / (self.n - 1) * self.win_sums / max(self.t, 1)


@dataclass
class RunResult:
    winner: int
    tau: int
    rounds: int
    eliminations: list[Elimination]
    config: dict
    seed: int | None
    correct: bool | None = None
    budget_exceeded: bool = False
    algorithm: str = "secs"
    state: AlgorithmState | None = field(default=None, repr=False, compare=False)
    history: list | None = field(default=None, repr=False, compare=False)

    def elimination_rounds(self) -> dict[int, int]:
        return {e.arm: e.round for e in self.eliminations}

    def to_dict(self) -> dict:
        """JSON-ready view with 1-based arm labels."""
        return {
            "algorithm": self.algorithm,
            "winner": self.winner + 1,
            "tau": self.tau,
            "rounds": self.rounds,
            "eliminations": [
                {"arm": e.arm + 1, "round": e.round, "condition": e.condition}
                for e in self.eliminations
            ],
            "config": self.config,
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
            "correct": self.correct,
            "budget_exceeded": self.budget_exceeded,
        }


def _truth(oracle: DuelOracle) -> int | None:
    prof = borda_profile(oracle.matrix)
    return prof.winner if prof.unique_winner else None


def _top_k_signed(diff: np.ndarray, valid: np.ndarray, k: int) -> np.ndarray:
    """Sum of signed ``diff`` over the k entries of largest ``|diff|`` on the last axis.

    Entries with ``valid`` False are never picked; ties go to the lowest index.
    """
    score = np.where(valid, np.abs(diff), -1.0)
    if k == 1:
        idx = np.argmax(score, axis=-1)[..., None]
    else:
        idx = np.argsort(-score, axis=-1, kind="stable")[..., :k]
    return np.take_along_axis(diff, idx, axis=-1).sum(axis=-1)


def _sparse_condition(ps, arms, ts, n, k, thresh):
    """Condition-1 flags, shape (B, m), from cumulative pair sums ``ps`` (B, m, n)."""
    B, m, _ = ps.shape
    p_hat = n * ps / ts[:, None, None]
    # row i minus row j, for every ordered pair of active arms
    diff = p_hat[:, :, None, :] - p_hat[:, None, :, :]
    cols = np.arange(n)
    valid = (cols[None, None, :] != arms[:, None, None]) & (cols[None, None, :] != arms[None, :, None])
    if k > 0:
        sparse_sum = _top_k_signed(diff, np.broadcast_to(valid, diff.shape), k)
    else:
        sparse_sum = np.zeros((B, m, m))
    direct = p_hat[:, :, arms]  # p_hat[b, i, arms[j]]
    delta_hat = 2.0 * (direct - 0.5) + sparse_sum
    idx = np.arange(m)
    delta_hat[:, idx, idx] = -np.inf
    return (delta_hat > thresh[:, None, None]).any(axis=1)


def _sparse_could_fire(ps, ts, n, k, thresh):
    """Cheap per-round upper bound check on the largest empirical partial gap."""
    p_hat = n * ps / ts[:, None, None]
    top = p_hat.max(axis=(1, 2))
    if k > 0:
        spread = p_hat.max(axis=1) - p_hat.min(axis=1)
        kk = min(k, spread.shape[1])
        best = -np.partition(-spread, kk - 1, axis=1)[:, :kk].sum(axis=1)
    else:
        best = 0.0
    return 2.0 * top - 1.0 + best > thresh


def run_secs(oracle: DuelOracle, config: RunConfig, *, record: bool = False) -> RunResult:
    """Run SECS until one arm survives or ``config.max_rounds`` is hit.

    With ``record=True`` the committed opponents and outcomes are kept on
    the result for offline recomputation of the estimators.
    """
    n = oracle.n
    t0 = config.gate(n)
    k = min(int(config.k), n - 2)
    state = AlgorithmState(n)
    history = [] if record else None
    block = _MIN_BLOCK
    exceeded = False

    while state.active.size > 1:
        if state.t >= config.max_rounds:
            exceeded = True
            break
        arms = state.active
        m = arms.size
        sparse_live = state.t + block > t0
        per_round = m * m * n + m * n if sparse_live else m
        size = int(min(block, max(1, _MAX_ELEMS // per_round), config.max_rounds - state.t))
        rb = oracle.preview_rounds(arms, size)
        Z = rb.outcomes.astype(np.int64)
        ts = state.t + 1 + np.arange(size, dtype=np.float64)

        wins = state.pair_sums[arms].sum(axis=1)[None, :] + np.cumsum(Z, axis=0)
        s_hat = n / (n - 1) * wins / ts[:, None]
        rad = bounds.borda_radius(n, ts, config.delta)
        flag2 = s_hat.max(axis=1, keepdims=True) > s_hat + rad[:, None]
        flag1 = np.zeros_like(flag2)

        if sparse_live:
            gate_open = ts > t0
            thresh = config.elim_const * (k + 1) * bounds.confidence_radius(n, ts, config.delta)
            contrib = np.zeros((size, m, n), dtype=np.int64)
            contrib[np.arange(size), :, rb.opponents] = Z
            ps = state.pair_sums[arms][None, :, :] + np.cumsum(contrib, axis=0)
            live = gate_open & _sparse_could_fire(ps, ts, n, k, thresh)
            if live.any():
                rows = np.flatnonzero(live)
                flag1[rows] = _sparse_condition(ps[rows], arms, ts[rows], n, k, thresh[rows])

        flagged = flag1 | flag2
        hit = np.flatnonzero(flagged.any(axis=1))
        used = int(hit[0]) + 1 if hit.size else size

        oracle.commit_rounds(rb, used)
        pairs_add = np.zeros((m, n), dtype=np.int64)
        np.add.at(pairs_add.T, rb.opponents[:used], Z[:used])
        state.pair_sums[arms] += pairs_add
        state.t += used
        if record:
            history.append((arms.copy(), rb.opponents[:used].copy(), rb.outcomes[:used].copy()))

        if not hit.size:
            block *= 2
            continue
        r = used - 1
        out = flagged[r]
        if out.all():
            keep = int(np.argmax(s_hat[r]))
            log.warning("round %d flagged every active arm; keeping arm %d", state.t, arms[keep])
            out = out.copy()
            out[keep] = False
        for pos in np.flatnonzero(out):
            cond = SPARSE if flag1[r, pos] else BORDA
            state.eliminations.append(Elimination(int(arms[pos]), state.t, cond))
        state.active = arms[~out]
        block = _MIN_BLOCK

    if state.active.size == 1:
        winner = int(state.active[0])
    else:
        s = state.s_hat()[state.active]
        winner = int(state.active[int(np.argmax(s))])
    truth = _truth(oracle)
    return RunResult(
        winner=winner,
        tau=oracle.tau,
        rounds=state.t,
        eliminations=list(state.eliminations),
        config={**config.to_dict(), "t0_effective": _jsonable(t0)},
        seed=oracle.rng_seed,
        correct=None if truth is None else winner == truth,
        budget_exceeded=exceeded,
        algorithm="br" if math.isinf(t0) else "secs",
        state=state,
        history=history,
    )


def run_borda_reduction(oracle: DuelOracle, config: RunConfig, *,
                        record: bool = False) -> RunResult:
    """SECS with the sparse test switched off: successive elimination on Borda scores."""
    cfg = RunConfig(k=config.k, t0=math.inf, R=None, delta=config.delta,
                    elim_const=config.elim_const, seed=config.seed,
                    max_rounds=config.max_rounds)
    return run_secs(oracle, cfg, record=record)


def recompute_estimates(history, n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Rebuild ``p_hat`` and ``s_hat`` from a recorded duel history."""
    sums = np.zeros((n, n))
    t = 0
    for arms, opponents, outcomes in history:
        for r in range(len(opponents)):
            for a, arm in enumerate(arms):
                sums[arm, opponents[r]] += outcomes[r, a]
        t += len(opponents)
    p_hat = n * sums / t
    s_hat = n / (n - 1) * sums.sum(axis=1) / t
    return p_hat, s_hat, t


def empirical_omega(p_hat: np.ndarray, i: int, j: int, k: int) -> tuple[int, ...]:
    """Top-k set of the empirical discrepancies between rows i and j."""
    n = p_hat.shape[0]
    cand = np.array([w for w in range(n) if w not in (i, j)], dtype=int)
    disc = np.abs(p_hat[i, cand] - p_hat[j, cand])
    return tuple(int(w) for w in cand[np.argsort(-disc, kind="stable")[:k]])


def run_known_permutation_p1(oracle: DuelOracle, eps: float, delta: float) -> RunResult:
    """Two-phase winner search on a relabeled copy of the easy instance.

    Phase one estimates every Borda score from ``ceil(32 log(n/delta))``
    random-opponent duels and keeps the two best arms. Phase two duels both
    against each remaining arm ``ceil(8 log(2/delta) / eps^2)`` times. Their
    rows differ in exactly one column on this instance, so the arm that is
    larger on the column of largest empirical discrepancy has the larger
    partial Borda score.
    """
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ConfigError("eps and delta must lie in (0, 1)")
    n = oracle.n
    m1 = math.ceil(32 * math.log(n / delta))
    est = np.empty(n)
    for i in range(n):
        bits, _ = oracle.borda_reduction_pulls(i, m1)
        est[i] = bits.mean()
    order = np.argsort(-est, kind="stable")
    if n > 2 and est[order[1]] == est[order[2]]:
        raise PhaseOneAmbiguity(
            f"second and third Borda estimates tie at {est[order[1]]:.4f}")
    a, b = sorted(int(x) for x in order[:2])
    elims = [Elimination(int(x), 1, BORDA) for x in sorted(order[2:])]

    m2 = math.ceil(8 * math.log(2 / delta) / eps**2)
    rest = np.array([w for w in range(n) if w not in (a, b)], dtype=np.intp)
    opp = np.repeat(rest, m2)
    wins_a = oracle.duels(np.full(opp.size, a), opp).reshape(rest.size, m2).mean(axis=1)
    wins_b = oracle.duels(np.full(opp.size, b), opp).reshape(rest.size, m2).mean(axis=1)
    diff = wins_a - wins_b
    col = int(np.argmax(np.abs(diff))) if rest.size else 0
    winner, loser = (a, b) if rest.size == 0 or diff[col] >= 0 else (b, a)
    elims.append(Elimination(loser, 2, SPARSE))

    truth = _truth(oracle)
    return RunResult(
        winner=winner, tau=oracle.tau, rounds=2, eliminations=elims,
        config={"eps": eps, "delta": delta, "phase1_duels": m1, "phase2_duels": m2},
        seed=oracle.rng_seed, correct=None if truth is None else winner == truth,
        algorithm="known-perm",
    )
