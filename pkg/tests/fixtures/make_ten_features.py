"""Regenerate ten_features.txt: 10 features of decreasing fidelity to relevance."""
from pathlib import Path

import numpy as np

rng = np.random.default_rng(2024)
noise = np.linspace(0.3, 3.0, 10)
lines = ["# 24 queries x 8 documents, 10 features; feature f = relevance + N(0, noise_f^2)"]
for qid in range(1, 25):
    rel = rng.integers(0, 3, size=8)
    feats = rel[:, None] + rng.normal(size=(8, 10)) * noise
    for r, row in zip(rel, np.round(feats, 3)):
        cols = " ".join(f"{i}:{x:g}" for i, x in enumerate(row, start=1))
        lines.append(f"{r} qid:{qid} {cols}")
Path(__file__).with_name("ten_features.txt").write_text("\n".join(lines) + "\n")
