"""STS benchmark loading and Pearson scoring."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from matrep.evaluation.metrics import pearson
from matrep.similarity import bank_colsums

log = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class StsPair:
    sentence_a_id: int
    sentence_b_id: int
    gold_score: float
    split: str

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")


@dataclass
class StsData:
    """Sentences (one training document each) and the pairs referring to them."""

    sentences: list[str]
    pairs: list[StsPair]
    skipped: int = 0


def parse_sts_lines(lines, split: str, data: StsData | None = None) -> StsData:
    """Parse tab-separated rows ``genre file year id score sentence1 sentence2 [...]``.

    Malformed rows are skipped and counted in ``data.skipped``.
    """
    data = data if data is not None else StsData([], [])
    for line in lines:
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 7:
            data.skipped += 1
            continue
        try:
            score = float(fields[4])
        except ValueError:
            data.skipped += 1
            continue
        if not 0.0 <= score <= 5.0:
            data.skipped += 1
            continue
        a = len(data.sentences)
        data.sentences.extend([fields[5], fields[6]])
        data.pairs.append(StsPair(a, a + 1, score, split))
    return data


def load_sts(directory: str | Path) -> StsData:
    """Read ``sts-train.csv``, ``sts-dev.csv`` and ``sts-test.csv`` from ``directory``."""
    directory = Path(directory)
    data = StsData([], [])
    for split in SPLITS:
        path = directory / f"sts-{split}.csv"
        if not path.exists():
            raise FileNotFoundError(path)
        with open(path, encoding="utf-8") as fh:
            parse_sts_lines(fh, split, data)
    if data.skipped:
        log.warning("skipped %d malformed STS rows", data.skipped)
    return data


def sts_scores(doc_bank: np.ndarray, pairs: Sequence[StsPair]) -> np.ndarray:
    bank = np.asarray(doc_bank, dtype=np.float64)
    n = bank.shape[0]
    for pair in pairs:
        if not (0 <= pair.sentence_a_id < n and 0 <= pair.sentence_b_id < n):
            raise KeyError(f"sentence id out of range in {pair}")
    sums = bank_colsums(bank)
    a = np.array([q.sentence_a_id for q in pairs], dtype=np.int64)
    b = np.array([q.sentence_b_id for q in pairs], dtype=np.int64)
    r = bank.shape[2]
    return np.einsum("ij,ij->i", sums[a], sums[b]) / (r * r)


def sts_evaluate(doc_bank: np.ndarray, pairs: Sequence[StsPair]) -> tuple[float, float]:
    """Pearson correlation of model similarity against gold, for dev and test."""
    scores = sts_scores(doc_bank, pairs)
    gold = np.array([q.gold_score for q in pairs])
    split = np.array([q.split for q in pairs])
    out = []
    for name in ("dev", "test"):
        mask = split == name
        out.append(pearson(scores[mask], gold[mask]) if mask.sum() >= 2 else float("nan"))
    return out[0], out[1]
