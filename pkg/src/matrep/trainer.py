"""Max-margin training of word and document matrices on the sphere.

For a center word U, a context word V from U's window, the document D that
contains them, and a negative center word N, the loss is

    max(0, m - g(V, U) - g(U, D) + g(V, N) + g(N, D))

summed (or averaged) over the drawn negatives. Word matrices are p x r1,
document matrices p x r2, r1 <= r2.

The functions ``loss_tuple``, ``grad_tuple`` and ``apply_update`` are plain
numpy reference implementations; ``train`` runs the compiled loop in
``matrep._kernel`` which computes the same step.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from matrep import _kernel
from matrep.corpus import Corpus, NegativeTable, Vocabulary, keep_probability
from matrep.manifold import (
    MatrixEmbedding,
    ShapeMismatchError,
    flatten,
    retract,
    tangent_project,
    unflatten,
)
from matrep.similarity import grad_g_wrt_A, sim_g

log = logging.getLogger(__name__)

MIN_ALPHA_FRACTION = 1e-4


class ConfigError(ValueError):
    pass


@dataclass
class TrainConfig:
    p: int = 100
    r1: int = 1
    r2: int = 1
    margin: float = 0.15
    alpha: float = 0.025
    iterations: int = 35
    max_window: int = 5
    negatives: int = 2
    min_count: int = 5
    sample: float = 1e-3
    threads: int = 1
    seed: int = 0
    negative_reduction: str = "sum"

    def __post_init__(self):
        if self.r1 < 1 or self.r2 < 1 or self.p < 1:
            raise ConfigError("dimensions p, r1, r2 must be positive")
        if self.r1 > self.r2:
            raise ConfigError(
                f"word columns r1={self.r1} exceed document columns r2={self.r2}; need r1 <= r2"
            )
        if self.r2 > self.p:
            raise ConfigError(f"columns r2={self.r2} exceed embedding size p={self.p}; need r <= p")
        if not self.margin > 0:
            raise ConfigError("margin must be positive")
        if not self.alpha > 0:
            raise ConfigError("learning rate must be positive")
        for name in ("iterations", "max_window", "negatives", "min_count", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not self.sample > 0:
            raise ConfigError("subsampling threshold must be positive")
        if self.negative_reduction not in ("sum", "mean"):
            raise ConfigError("negative_reduction must be 'sum' or 'mean'")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ModelParams:
    """Center-word, context-word and document banks, each shaped (n, p, r)."""

    center: np.ndarray
    context: np.ndarray
    docs: np.ndarray
    vocab: Vocabulary | None = None
    epoch_losses: list[float] = field(default_factory=list)
    norm_drift: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.center.shape != self.context.shape:
            raise ShapeMismatchError("center and context banks differ in shape")
        if self.center.shape[1] != self.docs.shape[1]:
            raise ShapeMismatchError("word and document banks differ in p")
        if self.r1 > self.r2:
            raise ShapeMismatchError("word columns exceed document columns")

    @property
    def p(self) -> int:
        return self.center.shape[1]

    @property
    def r1(self) -> int:
        return self.center.shape[2]

    @property
    def r2(self) -> int:
        return self.docs.shape[2]

    def banks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.center, self.context, self.docs


def _random_bank(n: int, p: int, r: int, rng: np.random.Generator) -> np.ndarray:
    bank = rng.uniform(-0.5 / p, 0.5 / p, size=(n, p, r))
    norms = np.sqrt(np.einsum("npr,npr->n", bank, bank))
    for i in np.flatnonzero(norms == 0):
        while norms[i] == 0:
            bank[i] = rng.uniform(-0.5 / p, 0.5 / p, size=(p, r))
            norms[i] = np.sqrt(np.sum(bank[i] ** 2))
    bank /= norms[:, None, None]
    return bank


def init_params(vocab_size: int, n_docs: int, config: TrainConfig, rng=None) -> ModelParams:
    if vocab_size < 1 or n_docs < 1:
        raise ValueError("vocab_size and n_docs must be positive")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    p, r1, r2 = config.p, config.r1, config.r2
    center = _random_bank(vocab_size, p, r1, rng)
    context = _random_bank(vocab_size, p, r1, rng)
    docs = _random_bank(n_docs, p, r2, rng)
    return ModelParams(center, context, docs)


def _hinges(V, U, N_set, D, m) -> list[float]:
    positive = sim_g(V, U) + sim_g(U, D)
    return [m - positive + sim_g(V, N) + sim_g(N, D) for N in N_set]


def _check_tuple(V, U, N_set, D):
    V, U, D = (np.asarray(X, dtype=np.float64) for X in (V, U, D))
    if V.shape != U.shape or any(np.shape(N) != U.shape for N in N_set):
        raise ShapeMismatchError("V, U and every negative must share one shape")
    if D.ndim != 2 or D.shape[0] != U.shape[0]:
        raise ShapeMismatchError("document matrix must have the same row dimension")
    if not N_set:
        raise ValueError("need at least one negative")
    return V, U, [np.asarray(N, dtype=np.float64) for N in N_set], D


def loss_tuple(V, U, N_set: Sequence, D, m: float, reduction: str = "sum") -> float:
    """Hinge loss for one positive tuple against each negative in ``N_set``."""
    V, U, N_set, D = _check_tuple(V, U, N_set, D)
    total = sum(max(0.0, h) for h in _hinges(V, U, N_set, D, m))
    return total / len(N_set) if reduction == "mean" else total


def grad_tuple(V, U, N_set: Sequence, D, m: float, reduction: str = "sum"):
    """Euclidean gradients (dV, dU, [dN...], dD) of ``loss_tuple``.

    Inactive hinges (value <= 0) contribute nothing.
    """
    V, U, N_set, D = _check_tuple(V, U, N_set, D)
    scale = 1.0 / len(N_set) if reduction == "mean" else 1.0
    gV = np.zeros_like(V)
    gU = np.zeros_like(U)
    gD = np.zeros_like(D)
    gN = []
    for N, h in zip(N_set, _hinges(V, U, N_set, D, m)):
        if h > 0:
            gV += scale * (grad_g_wrt_A(V, N) - grad_g_wrt_A(V, U))
            gU -= scale * (grad_g_wrt_A(U, V) + grad_g_wrt_A(U, D))
            gD += scale * (grad_g_wrt_A(D, N) - grad_g_wrt_A(D, U))
            gN.append(scale * (grad_g_wrt_A(N, V) + grad_g_wrt_A(N, D)))
        else:
            gN.append(np.zeros_like(N))
    return gV, gU, gN, gD


def apply_update(param, euclid_grad, lr: float) -> MatrixEmbedding:
    """Riemannian gradient step: flatten, project to the tangent space, retract."""
    if not isinstance(param, MatrixEmbedding):
        param = MatrixEmbedding(param)
    euclid_grad = np.asarray(euclid_grad, dtype=np.float64)
    if euclid_grad.shape != param.data.shape:
        raise ShapeMismatchError(
            f"gradient shape {euclid_grad.shape} does not match parameter {param.data.shape}"
        )
    x = flatten(param)
    v = tangent_project(x.data, euclid_grad.reshape(-1))
    y = retract(x.data, v, lr)
    return unflatten(type(x)(y, x.p, x.r))


def reference_step(
    params: ModelParams, u: int, v: int, d: int, negs: Sequence[int], lr: float, m: float,
    reduction: str = "sum",
) -> float:
    """Numpy version of one compiled training step, updating ``params`` in place."""
    center, context, docs = params.banks()
    N_set = [center[n].copy() for n in negs]
    loss = loss_tuple(context[v], center[u], N_set, docs[d], m, reduction)
    gV, gU, gN, gD = grad_tuple(context[v], center[u], N_set, docs[d], m, reduction)
    if loss == 0.0:
        return loss
    context[v] = apply_update(context[v], gV, lr).data
    center[u] = apply_update(center[u], gU, lr).data
    docs[d] = apply_update(docs[d], gD, lr).data
    for n, g in zip(negs, gN):
        if np.any(g):
            center[n] = apply_update(center[n], g, lr).data
    return loss


def _shard_bounds(offsets: np.ndarray, workers: int) -> list[tuple[int, int]]:
    """Split documents into contiguous shards with roughly equal token counts."""
    n_docs = len(offsets) - 1
    workers = max(1, min(workers, n_docs))
    targets = offsets[-1] * np.arange(1, workers) / workers
    cuts = np.searchsorted(offsets, targets, side="left").tolist()
    bounds = []
    lo = 0
    for c in cuts + [n_docs]:
        c = max(lo, min(int(c), n_docs))
        bounds.append((lo, c))
        lo = c
    return [b for b in bounds if b[1] > b[0]] or [(0, n_docs)]


def renormalize(bank: np.ndarray) -> float:
    """Project every entry back to unit norm; return the max deviation found."""
    norms = np.sqrt(np.einsum("npr,npr->n", bank, bank))
    drift = float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0
    bank /= norms[:, None, None]
    return drift


def _as_corpus(corpus, min_count: int) -> Corpus:
    if isinstance(corpus, Corpus):
        return corpus
    if isinstance(corpus, (str, Path)):
        return Corpus.from_file(corpus, min_count)
    return Corpus.from_texts(corpus, min_count)


def train(
    corpus,
    config: TrainConfig | None = None,
    params: ModelParams | None = None,
    on_epoch: Callable[[int, ModelParams], None] | None = None,
) -> ModelParams:
    """Train word and document banks on ``corpus``.

    ``corpus`` may be a :class:`Corpus`, a path to a one-document-per-line
    text file, or a sequence of document strings. ``on_epoch(epoch, params)``
    is called after each pass, once the banks have been renormalized.
    """
    config = config or TrainConfig()
    corpus = _as_corpus(corpus, config.min_count)
    vocab = corpus.vocab
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    if params is None:
        params = init_params(len(vocab), len(corpus), config)
    params.vocab = vocab

    tokens, offsets = corpus.flat()
    keep = keep_probability(vocab.counts, vocab.total_tokens, config.sample)
    neg_cdf = NegativeTable(vocab.counts).cdf
    shards = _shard_bounds(offsets, config.threads)
    states = [np.array([config.seed + i], dtype=np.uint64) for i in range(len(shards))]
    progress = [np.zeros(1, dtype=np.int64) for _ in shards]
    scheduled = [
        float(max(1, config.iterations * (offsets[hi] - offsets[lo]))) for lo, hi in shards
    ]
    mean_neg = config.negative_reduction == "mean"
    center, context, docs = params.banks()

    def run(i: int) -> np.ndarray:
        lo, hi = shards[i]
        stats = np.zeros(2)
        _kernel.train_shard(
            tokens, offsets, lo, hi, keep, neg_cdf, center, context, docs,
            config.margin, config.alpha, MIN_ALPHA_FRACTION, config.max_window,
            config.negatives, mean_neg, states[i], progress[i], scheduled[i], stats,
        )
        return stats

    log.info(
        "training: %d docs, %d words, %d tokens, p=%d r1=%d r2=%d, %d worker(s)",
        len(corpus), len(vocab), len(tokens), config.p, config.r1, config.r2, len(shards),
    )
    pool = ThreadPoolExecutor(len(shards)) if len(shards) > 1 else None
    try:
        for epoch in range(config.iterations):
            t0 = time.perf_counter()
            if pool is None:
                results = [run(0)]
            else:
                results = list(pool.map(run, range(len(shards))))
            loss_sum = sum(r[0] for r in results)
            count = sum(r[1] for r in results)
            drift = max(renormalize(b) for b in (center, context, docs))
            avg = loss_sum / count if count else 0.0
            params.epoch_losses.append(avg)
            params.norm_drift.append(drift)
            log.info(
                "epoch %d/%d: mean loss %.6f over %d tuples, max norm drift %.2e (%.1fs)",
                epoch + 1, config.iterations, avg, int(count), drift, time.perf_counter() - t0,
            )
            if on_epoch is not None:
                on_epoch(epoch, params)
    finally:
        if pool is not None:
            pool.shutdown()
    return params
