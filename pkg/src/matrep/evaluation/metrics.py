"""External clustering measures, F1 scores and Pearson correlation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ContingencyTable:
    """Cluster-by-class count matrix."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise ValueError("contingency counts must be a 2-d matrix")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_labels(cls, clusters: Sequence, classes: Sequence) -> "ContingencyTable":
        clusters = np.asarray(clusters)
        classes = np.asarray(classes)
        if clusters.shape != classes.shape:
            raise ValueError("label vectors differ in length")
        _, ci = np.unique(clusters, return_inverse=True)
        _, ki = np.unique(classes, return_inverse=True)
        counts = np.zeros((ci.max(initial=-1) + 1, ki.max(initial=-1) + 1), dtype=np.int64)
        np.add.at(counts, (ci, ki), 1)
        return cls(counts)

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _nonempty(t: ContingencyTable) -> None:
    if t.total == 0:
        raise ValueError("empty contingency table")


def purity(t: ContingencyTable) -> float:
    _nonempty(t)
    return float(t.counts.max(axis=1).sum()) / t.total


def _entropy(marginal: np.ndarray) -> float:
    p = marginal[marginal > 0] / marginal.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_info(t: ContingencyTable) -> float:
    """Mutual information between clusters and classes, in nats."""
    _nonempty(t)
    n = float(t.total)
    a = t.row_sums.astype(np.float64)
    b = t.col_sums.astype(np.float64)
    i, j = np.nonzero(t.counts)
    nij = t.counts[i, j].astype(np.float64)
    mi = np.sum(nij / n * (np.log(nij * n) - np.log(a[i] * b[j])))
    return max(float(mi), 0.0)


def nmi(t: ContingencyTable, average: str = "arithmetic") -> float:
    """Mutual information normalized by the mean of the two entropies.

    Defined as 0 when either partition has zero entropy and MI is 0.
    """
    h_clusters = _entropy(t.row_sums)
    h_classes = _entropy(t.col_sums)
    mi = mutual_info(t)
    if average == "arithmetic":
        denom = 0.5 * (h_clusters + h_classes)
    elif average == "geometric":
        denom = np.sqrt(h_clusters * h_classes)
    else:
        raise ValueError(f"unknown average {average!r}")
    if h_clusters == 0.0 or h_classes == 0.0 or denom <= 0.0:
        return 0.0
    return float(min(mi / denom, 1.0))


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def ari(t: ContingencyTable) -> float:
    _nonempty(t)
    sum_ij = _comb2(t.counts).sum()
    sum_a = _comb2(t.row_sums).sum()
    sum_b = _comb2(t.col_sums).sum()
    total_pairs = _comb2(t.total)
    expected = sum_a * sum_b / total_pairs if total_pairs > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # degenerate: both partitions are all-singletons or one cluster
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def cluster_report(clusters: Sequence, classes: Sequence) -> dict[str, float]:
    t = ContingencyTable.from_labels(clusters, classes)
    return {"MI": mutual_info(t), "NMI": nmi(t), "ARI": ari(t), "Purity": purity(t)}


def f1_scores(predicted: Sequence, gold: Sequence) -> tuple[float, float]:
    """Macro- and micro-averaged F1 for single-label multiclass predictions."""
    predicted = list(predicted)
    gold = list(gold)
    if len(predicted) != len(gold):
        raise ValueError("predicted and gold differ in length")
    if not gold:
        raise ValueError("no predictions")
    classes = sorted(set(gold) | set(predicted), key=str)
    f1s = []
    tp_all = fp_all = fn_all = 0
    for c in classes:
        tp = sum(1 for p, g in zip(predicted, gold) if p == c and g == c)
        fp = sum(1 for p, g in zip(predicted, gold) if p == c and g != c)
        fn = sum(1 for p, g in zip(predicted, gold) if p != c and g == c)
        tp_all += tp
        fp_all += fp
        fn_all += fn
        f1s.append(2 * tp / (2 * tp + fp + fn) if tp else 0.0)
    macro = float(np.mean(f1s))
    micro = 2 * tp_all / (2 * tp_all + fp_all + fn_all) if tp_all else 0.0
    return macro, float(micro)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two vectors of equal length")
    if x.size < 2:
        raise ValueError("pearson needs at least two points")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom == 0.0:
        return float("nan")
    return float(np.clip(np.dot(xc, yc) / denom, -1.0, 1.0))
