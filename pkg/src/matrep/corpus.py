"""Corpus ingestion, vocabulary, subsampling, context windows and negative sampling."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, split punctuation into separate tokens, split on whitespace."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Vocabulary:
    tokens: list[str]
    counts: np.ndarray
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if len(self.tokens) != len(self.counts):
            raise ValueError("tokens and counts differ in length")
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate tokens in vocabulary")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        index = self.index
        return np.fromiter((index[t] for t in tokens if t in index), dtype=np.int32)


def build_vocab(corpus: Iterable[Sequence[str]], min_count: int = 5) -> Vocabulary:
    """Count tokens over ``corpus`` (an iterable of token sequences).

    Ids follow order of first appearance; tokens rarer than ``min_count``
    are dropped.
    """
    if min_count < 1:
        raise ValueError("min_count must be positive")
    counts: Counter[str] = Counter()
    for doc in corpus:
        counts.update(doc)
    # Counter preserves insertion order, i.e. first appearance
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    if not kept:
        raise ValueError(f"vocabulary is empty after filtering with min_count={min_count}")
    tokens, freqs = zip(*kept)
    return Vocabulary(list(tokens), np.array(freqs, dtype=np.int64))


@dataclass(frozen=True)
class Document:
    doc_id: int
    token_ids: np.ndarray


@dataclass
class Corpus:
    """Documents (one per input line) encoded against a vocabulary."""

    vocab: Vocabulary
    docs: list[Document]

    def __len__(self) -> int:
        return len(self.docs)

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated token ids and document offsets (length n_docs + 1)."""
        lengths = np.array([len(d.token_ids) for d in self.docs], dtype=np.int64)
        offsets = np.zeros(len(self.docs) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        if self.docs:
            tokens = np.concatenate([d.token_ids for d in self.docs]).astype(np.int32)
        else:
            tokens = np.zeros(0, dtype=np.int32)
        return tokens, offsets

    @classmethod
    def from_texts(cls, texts: Iterable[str], min_count: int = 5) -> "Corpus":
        tokenized = [tokenize(t) for t in texts]
        vocab = build_vocab(tokenized, min_count)
        docs = [Document(i, vocab.encode(toks)) for i, toks in enumerate(tokenized)]
        return cls(vocab, docs)

    @classmethod
    def from_file(cls, path: str | Path, min_count: int = 5) -> "Corpus":
        return cls.from_texts(read_lines(path), min_count)


def read_lines(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def read_labels(path: str | Path) -> list[str]:
    return [line.strip() for line in read_lines(path)]


def keep_probability(count, total, t: float = 1e-3):
    """Probability of keeping a token with corpus frequency ``count / total``."""
    ratio = t / (np.asarray(count, dtype=np.float64) / total)
    return np.minimum(1.0, np.sqrt(ratio) + ratio)


def subsample_keep(count: int, total: int, t: float, rng: np.random.Generator) -> bool:
    if not 0 < count <= total:
        raise ValueError("need 0 < count <= total")
    if t <= 0:
        raise ValueError("threshold must be positive")
    return bool(rng.random() < keep_probability(count, total, t))


def iter_windows(
    doc: Document | Sequence[int], max_window: int, rng: np.random.Generator
) -> Iterator[tuple[int, int]]:
    """Yield (center, context) id pairs using a shrunk window per center.

    For every center position the effective half-width is drawn uniformly
    from 1..max_window.
    """
    ids = doc.token_ids if isinstance(doc, Document) else doc
    n = len(ids)
    for i in range(n):
        b = int(rng.integers(1, max_window + 1))
        for j in range(max(0, i - b), min(n, i + b + 1)):
            if j != i:
                yield int(ids[i]), int(ids[j])


class NegativeTable:
    """Sampler for word ids with probability proportional to count**power."""

    def __init__(self, counts, power: float = 0.75):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.ndim != 1 or counts.size == 0 or np.any(counts <= 0):
            raise ValueError("counts must be a non-empty vector of positive values")
        weights = counts**power
        self.probabilities = weights / weights.sum()
        cdf = np.cumsum(self.probabilities)
        cdf[-1] = 1.0
        self.cdf = cdf

    def __len__(self) -> int:
        return self.cdf.size

    def draw(self, u):
        """Map uniform variates in [0, 1) to word ids."""
        return np.searchsorted(self.cdf, u, side="right")

    def sample(self, rng: np.random.Generator, size=None):
        return self.draw(rng.random(size))


def sample_negative(table: NegativeTable, rng: np.random.Generator) -> int:
    return int(table.draw(rng.random()))
