"""Seeded stochastic duel source with exact duel accounting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange
from .preference import PreferenceMatrix

RNG_ALGORITHM = "numpy.random.Philox"


def trial_seed(master_seed: int, trial: int) -> int:
    return (int(master_seed) ^ int(trial)) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RoundBlock:
    """Pre-drawn rounds: one random opponent per round, one bit per arm.

    ``outcomes[r, a]`` is the result of ``arms[a]`` dueling
    ``opponents[r]``; it is 0 where the two coincide.
    """

    arms: np.ndarray
    opponents: np.ndarray
    outcomes: np.ndarray

    def __len__(self):
        return len(self.opponents)


class DuelOracle:
    """Answers duels ``i`` vs ``j`` with ``Bernoulli(p[i, j])`` bits.

    A self-duel returns 0, uses no randomness and no budget; it is tallied
    in ``self_duels`` only.
    """

    def __init__(self, matrix: PreferenceMatrix, seed: int = 0):
        self.matrix = matrix
        self.rng_seed = int(seed)
        self.rng = np.random.Generator(np.random.Philox(self.rng_seed))
        self.tau = 0
        self.self_duels = 0
        self.counts = np.zeros((matrix.n, matrix.n), dtype=np.int64)

    @property
    def n(self) -> int:
        return self.matrix.n

    def _check(self, *arms) -> None:
        n = self.n
        for a in arms:
            a = np.asarray(a)
            if a.size and (a.min() < 0 or a.max() >= n):
                raise IndexOutOfRange(f"arm index outside [0, {n})")

    def duel(self, i: int, j: int) -> int:
        self._check(i, j)
        if i == j:
            self.self_duels += 1
            return 0
        bit = int(self.rng.random() < self.matrix.p[i, j])
        self.tau += 1
        self.counts[i, j] += 1
        self.counts[j, i] += 1
        return bit

    def duels(self, arms, opponents) -> np.ndarray:
        """Vectorized :meth:`duel` over paired index arrays."""
        arms = np.asarray(arms, dtype=np.intp)
        opponents = np.asarray(opponents, dtype=np.intp)
        self._check(arms, opponents)
        real = arms != opponents
        u = self.rng.random(int(real.sum()))
        bits = np.zeros(arms.shape, dtype=np.int8)
        bits[real] = u < self.matrix.p[arms[real], opponents[real]]
        self._charge_pairs(arms[real], opponents[real])
        self.self_duels += int((~real).sum())
        return bits

    def borda_reduction_pull(self, i: int) -> tuple[int, int]:
        """Duel ``i`` against an opponent drawn uniformly from the other arms."""
        self._check(i)
        j = int(self.rng.integers(self.n - 1))
        j += j >= i
        return self.duel(i, j), j

    def borda_reduction_pulls(self, i: int, count: int) -> tuple[np.ndarray, np.ndarray]:
        self._check(i)
        opp = self.rng.integers(self.n - 1, size=count)
        opp += opp >= i
        return self.duels(np.full(count, i), opp), opp

    def preview_rounds(self, arms, count: int) -> RoundBlock:
        """Draw ``count`` rounds against uniform opponents without charging.

        Randomness is consumed; nothing is counted until
        :meth:`commit_rounds`. Rounds that are never committed are simply
        discarded by the caller.
        """
        arms = np.asarray(arms, dtype=np.intp)
        opp = self.rng.integers(self.n, size=count)
        u = self.rng.random((count, arms.size))
        bits = (u < self.matrix.p[arms[None, :], opp[:, None]]).astype(np.int8)
        bits[arms[None, :] == opp[:, None]] = 0
        return RoundBlock(arms=arms, opponents=opp, outcomes=bits)

    def commit_rounds(self, block: RoundBlock, count: int) -> None:
        opp = block.opponents[:count]
        arms = block.arms
        hits = np.bincount(opp, minlength=self.n)
        own = hits[arms]
        self.self_duels += int(own.sum())
        total = count * arms.size - int(own.sum())
        self.tau += total
        # every arm met every opponent as often as that opponent was drawn
        add = np.broadcast_to(hits, (arms.size, self.n)).copy()
        add[np.arange(arms.size), arms] = 0
        self.counts[arms, :] += add
        self.counts[:, arms] += add.T

    def _charge_pairs(self, a: np.ndarray, b: np.ndarray) -> None:
        self.tau += int(a.size)
        np.add.at(self.counts, (a, b), 1)
        np.add.at(self.counts, (b, a), 1)

    def snapshot(self) -> tuple[int, np.ndarray]:
        return self.tau, self.counts.copy()
