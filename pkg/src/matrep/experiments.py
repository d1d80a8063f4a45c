"""End-to-end runs: train, then cluster / classify / score STS."""

from __future__ import annotations

import dataclasses
import logging
from typing import Callable, Iterable, Sequence

import numpy as np

from matrep.corpus import Corpus
from matrep.evaluation.cluster import spectral_cluster, stratified_subsample
from matrep.evaluation.knn import knn_classify
from matrep.evaluation.metrics import cluster_report, f1_scores
from matrep.evaluation.sts import StsData, sts_evaluate
from matrep.trainer import TrainConfig, train

log = logging.getLogger(__name__)

STS_OVERRIDES = {"iterations": 1000, "max_window": 15, "negatives": 5}


def grid(max_cols: int = 4, r1_values: Iterable[int] | None = None) -> list[tuple[int, int]]:
    """(r1, r2) cells with r1 <= r2 <= max_cols."""
    r1_values = range(1, max_cols + 1) if r1_values is None else r1_values
    return [(r1, r2) for r1 in r1_values for r2 in range(r1, max_cols + 1)]


def with_seed(config: TrainConfig, seed: int, **changes) -> TrainConfig:
    return dataclasses.replace(config, seed=seed, **changes)


def clustering_run(
    corpus: Corpus,
    labels: Sequence[str],
    config: TrainConfig,
    k: int = 20,
    gamma: float = 0.001,
    subsample: int | None = 4000,
    sample_seed: int = 0,
) -> dict[str, float]:
    if len(labels) != len(corpus):
        raise ValueError("labels and documents differ in count")
    model = train(corpus, config)
    idx = np.arange(len(labels))
    if subsample is not None:
        idx = stratified_subsample(labels, subsample, sample_seed)
    clusters = spectral_cluster(model.docs[idx], k, gamma, seed=config.seed)
    return cluster_report(clusters, [labels[i] for i in idx])


def classification_run(
    corpus: Corpus,
    labels: Sequence[str],
    train_idx: Sequence[int],
    test_idx: Sequence[int],
    config: TrainConfig,
    knn: int = 3,
) -> dict[str, float]:
    """Embeddings for every document are learned jointly (unsupervised); only
    the k-NN step separates train and test documents."""
    model = train(corpus, config)
    train_idx = np.asarray(train_idx)
    test_idx = np.asarray(test_idx)
    pred = knn_classify(model.docs[train_idx], [labels[i] for i in train_idx], model.docs[test_idx], knn)
    macro, micro = f1_scores(pred, [labels[i] for i in test_idx])
    return {"macro_f1": macro, "micro_f1": micro}


def sts_run(data: StsData, config: TrainConfig) -> dict[str, float]:
    corpus = Corpus.from_texts(data.sentences, config.min_count)
    model = train(corpus, config)
    dev, test = sts_evaluate(model.docs, data.pairs)
    return {"dev_pearson": dev, "test_pearson": test}


def over_seeds(run: Callable[[TrainConfig], dict[str, float]], config: TrainConfig, seeds: Sequence[int]) -> dict:
    """Run once per seed; report per-metric mean and std alongside raw values."""
    results = []
    for s in seeds:
        res = run(with_seed(config, s))
        log.info("seed %d: %s", s, res)
        results.append(res)
    summary: dict = {"runs": results}
    for key in results[0]:
        vals = np.array([r[key] for r in results], dtype=np.float64)
        summary[key] = float(vals.mean())
        summary[key + "_std"] = float(vals.std())
    return summary
