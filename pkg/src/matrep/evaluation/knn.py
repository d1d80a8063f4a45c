"""k-nearest-neighbor classification under the mean pairwise column distance."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from matrep.evaluation.cluster import _as_bank
from matrep.similarity import pairwise_dist2


def nearest_neighbors(train_bank, query_bank, k: int, chunk: int = 1024) -> np.ndarray:
    """Indices of the k closest training entries per query, nearest first.

    Equal distances are ordered by training index.
    """
    train_bank = _as_bank(train_bank)
    query_bank = _as_bank(query_bank)
    out = np.empty((query_bank.shape[0], k), dtype=np.int64)
    for start in range(0, query_bank.shape[0], chunk):
        D = pairwise_dist2(query_bank[start : start + chunk], train_bank)
        out[start : start + chunk] = np.argsort(D, axis=1, kind="stable")[:, :k]
    return out


def _vote(neighbor_labels: Sequence):
    counts: dict = {}
    for lab in neighbor_labels:
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    # tie: the tied label whose neighbor ranks closest
    for lab in neighbor_labels:
        if counts[lab] == best:
            return lab


def knn_classify(train_embeds, train_labels: Sequence, query_embeds, k: int = 3) -> list:
    train_labels = list(train_labels)
    if not train_labels:
        raise ValueError("empty training set")
    train_bank = _as_bank(train_embeds)
    if train_bank.shape[0] != len(train_labels):
        raise ValueError("training embeddings and labels differ in count")
    if not 1 <= k <= len(train_labels):
        raise ValueError(f"k={k} must be between 1 and the training size")
    idx = nearest_neighbors(train_bank, query_embeds, k)
    return [_vote([train_labels[j] for j in row]) for row in idx]


def train_test_split(n: int, train_fraction: float = 0.8, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Random split of range(n); both index arrays are sorted."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(n)
    cut = int(round(train_fraction * n))
    return np.sort(perm[:cut]), np.sort(perm[cut:])
