"""Preference matrices from learning-to-rank data: each feature is an arm.

Two features duel on a random document pair of a random query. A feature
*agrees* with the pair when it orders the two documents the same way as
their relevance labels (equal scores never agree). If exactly one feature
agrees it wins; otherwise a fair coin decides.

File format, one document per line (LETOR style)::

    <relevance:int> qid:<int> 1:<real> 2:<real> ... m:<real>  [# comment]
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InconsistentFeatureCount, NoComparablePairs, ParseError
from .preference import PreferenceMatrix, validate


@dataclass(frozen=True)
class Query:
    qid: int
    relevance: np.ndarray
    features: np.ndarray  # (docs, m)


@dataclass(frozen=True)
class RankingDataset:
    queries: tuple[Query, ...]

    @property
    def n_features(self) -> int:
        return self.queries[0].features.shape[1]

    @property
    def n_docs(self) -> int:
        return sum(len(q.relevance) for q in self.queries)

    def drop_features(self, drop) -> "RankingDataset":
        keep = np.setdiff1d(np.arange(self.n_features), np.asarray(list(drop), dtype=int))
        return RankingDataset(tuple(Query(q.qid, q.relevance, q.features[:, keep])
                                    for q in self.queries))

    def comparable_pairs(self) -> "PairTable":
        return PairTable.from_dataset(self)


@dataclass(frozen=True)
class PairTable:
    """All within-query document pairs whose relevance labels differ.

    ``agree[f, r]`` says whether feature ``f`` orders pair ``r`` like the labels.
    """

    query_of: np.ndarray
    offsets: np.ndarray
    sizes: np.ndarray
    agree: np.ndarray

    @classmethod
    def from_dataset(cls, ds: RankingDataset) -> "PairTable":
        blocks, qof, sizes = [], [], []
        for qi, q in enumerate(ds.queries):
            a, b = np.triu_indices(len(q.relevance), 1)
            rel = np.sign(q.relevance[a] - q.relevance[b])
            keep = rel != 0
            a, b, rel = a[keep], b[keep], rel[keep]
            sizes.append(a.size)
            if a.size:
                score = np.sign(q.features[a] - q.features[b])  # (pairs, m)
                blocks.append((score == rel[:, None]).T)
                qof.append(np.full(a.size, qi))
        sizes = np.array(sizes)
        if not blocks:
            raise NoComparablePairs("no query has two documents with distinct relevance")
        agree = np.concatenate(blocks, axis=1)
        offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        return cls(np.concatenate(qof), offsets, sizes, agree)

    @property
    def eligible(self) -> np.ndarray:
        return np.flatnonzero(self.sizes > 0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Pair indices: uniform eligible query, then uniform pair within it."""
        elig = self.eligible
        q = elig[rng.integers(elig.size, size=size)]
        return self.offsets[q] + (rng.random(size) * self.sizes[q]).astype(np.int64)


@dataclass(frozen=True)
class MatrixBuildReport:
    matrix: PreferenceMatrix
    samples_per_pair: int
    tie_rate: float


def _parse_line(line: str, lineno: int):
    body = line.split("#", 1)[0].split()
    if len(body) < 2:
        raise ParseError("expected '<relevance> qid:<id> <f>:<value> ...'", lineno)
    try:
        rel = int(body[0])
    except ValueError:
        raise ParseError(f"relevance {body[0]!r} is not an integer", lineno) from None
    if not body[1].startswith("qid:"):
        raise ParseError(f"expected qid:<int>, got {body[1]!r}", lineno)
    try:
        qid = int(body[1][4:])
    except ValueError:
        raise ParseError(f"bad query id {body[1]!r}", lineno) from None
    values = []
    for pos, tok in enumerate(body[2:], start=1):
        key, sep, val = tok.partition(":")
        if not sep:
            raise ParseError(f"feature token {tok!r} lacks ':'", lineno)
        try:
            idx, x = int(key), float(val)
        except ValueError:
            raise ParseError(f"bad feature token {tok!r}", lineno) from None
        if idx != pos:
            raise ParseError(f"feature {idx} out of order, expected {pos}", lineno)
        values.append(x)
    if not values:
        raise ParseError("document has no features", lineno)
    return qid, rel, values


def load_dataset(path) -> RankingDataset:
    groups: dict[int, list] = {}
    m = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        qid, rel, values = _parse_line(line, lineno)
        if m is None:
            m = len(values)
        elif len(values) != m:
            raise InconsistentFeatureCount(f"{len(values)} features, expected {m}", lineno)
        groups.setdefault(qid, []).append((rel, values))
    if m is None:
        raise ParseError("no documents found")
    queries = tuple(
        Query(qid, np.array([r for r, _ in docs]), np.array([v for _, v in docs], dtype=float))
        for qid, docs in groups.items()
    )
    return RankingDataset(queries)


def save_dataset(ds: RankingDataset, path) -> None:
    lines = []
    for q in ds.queries:
        for rel, feats in zip(q.relevance, q.features):
            cols = " ".join(f"{i}:{x!r}" for i, x in enumerate(feats.tolist(), start=1))
            lines.append(f"{int(rel)} qid:{q.qid} {cols}")
    Path(path).write_text("\n".join(lines) + "\n")


def _resolve(a1: np.ndarray, a2: np.ndarray, coins: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    decided = a1 != a2
    return np.where(decided, a1, coins), ~decided


def simulate_feature_duel(dataset: RankingDataset | PairTable, f1: int, f2: int,
                          rng: np.random.Generator) -> int:
    """One duel between features ``f1`` and ``f2``; returns 1 if ``f1`` wins."""
    if f1 == f2:
        raise ValueError("features must differ")
    table = dataset if isinstance(dataset, PairTable) else dataset.comparable_pairs()
    r = table.sample(rng, 1)[0]
    coin = rng.random() < 0.5
    bit, _ = _resolve(table.agree[f1, r], table.agree[f2, r], np.array(coin))
    return int(bit)


def exact_duel_probability(dataset: RankingDataset, f1: int, f2: int) -> float:
    """Probability that ``f1`` beats ``f2``, by enumerating every comparable pair."""
    table = dataset.comparable_pairs()
    total = 0.0
    for q in table.eligible:
        sl = slice(table.offsets[q], table.offsets[q] + table.sizes[q])
        a1, a2 = table.agree[f1, sl], table.agree[f2, sl]
        wins = np.where(a1 == a2, 0.5, a1.astype(float))
        total += wins.mean()
    return total / table.eligible.size


def build_matrix(dataset: RankingDataset, samples_per_pair: int, seed: int = 0) -> MatrixBuildReport:
    """Monte Carlo preference matrix over features.

    Each unordered pair gets its own generator seeded from ``(seed, i, j)``,
    so the result does not depend on evaluation order.
    """
    if samples_per_pair < 1:
        raise ValueError("samples_per_pair must be >= 1")
    table = dataset.comparable_pairs()
    m = dataset.n_features
    p = np.full((m, m), 0.5)
    ties = 0
    for i in range(m):
        for j in range(i + 1, m):
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
            r = table.sample(rng, samples_per_pair)
            coins = rng.random(samples_per_pair) < 0.5
            bits, tied = _resolve(table.agree[i, r], table.agree[j, r], coins)
            p[i, j] = bits.mean()
            p[j, i] = 1.0 - p[i, j]
            ties += int(tied.sum())
    n_pairs = m * (m - 1) // 2
    tie_rate = ties / (n_pairs * samples_per_pair) if n_pairs else 0.0
    return MatrixBuildReport(validate(p), samples_per_pair, tie_rate)
