"""Conversion of raw dataset distributions to one-document-per-line corpora.

Outputs are ``corpus.txt`` (one document per line), ``labels.txt`` (one
label per line, aligned) and, where the dataset has a fixed split,
``split.txt`` (``train``/``test`` per line).
"""

from __future__ import annotations

import re
from pathlib import Path

_WS = re.compile(r"\s+")
_QUOTE = re.compile(r"(writes in|writes:|wrote:|says:|said:|^In article|^Quoted from|^\||^>)")


def _one_line(text: str) -> str:
    return _WS.sub(" ", text).strip().lower()


def strip_newsgroup_post(text: str) -> str:
    """Drop the header block, quoted lines and a trailing signature."""
    _, blank, body = text.partition("\n\n")
    if not blank:
        body = text
    lines = [ln for ln in body.split("\n") if not _QUOTE.search(ln)]
    body = "\n".join(lines).strip()
    head, sep, tail = body.rpartition("\n--")
    if sep and tail.count("\n") < 4:
        body = head
    return body


def _write(out_dir: Path, docs, labels, splits=None) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "corpus.txt").write_text("".join(d + "\n" for d in docs), encoding="utf-8")
    (out_dir / "labels.txt").write_text("".join(lab + "\n" for lab in labels), encoding="utf-8")
    if splits is not None:
        (out_dir / "split.txt").write_text("".join(s + "\n" for s in splits), encoding="utf-8")
    return len(docs)


def prepare_20newsgroups(raw_dir: str | Path, out_dir: str | Path) -> int:
    """Convert the ``20news-bydate`` distribution.

    ``raw_dir`` must hold ``20news-bydate-train/`` and ``20news-bydate-test/``
    with one subdirectory per newsgroup. Empty posts are dropped.
    """
    raw_dir = Path(raw_dir)
    docs, labels, splits = [], [], []
    for split in ("train", "test"):
        root = raw_dir / f"20news-bydate-{split}"
        if not root.is_dir():
            raise FileNotFoundError(root)
        for group in sorted(p for p in root.iterdir() if p.is_dir()):
            for post in sorted(group.iterdir(), key=lambda p: p.name):
                text = _one_line(strip_newsgroup_post(post.read_text(encoding="latin-1")))
                if text:
                    docs.append(text)
                    labels.append(group.name)
                    splits.append(split)
    return _write(Path(out_dir), docs, labels, splits)


def prepare_movie_reviews(raw_dir: str | Path, out_dir: str | Path) -> int:
    """Convert the polarity dataset (``pos/`` and ``neg/`` directories of reviews)."""
    raw_dir = Path(raw_dir)
    if (raw_dir / "txt_sentoken").is_dir():
        raw_dir = raw_dir / "txt_sentoken"
    docs, labels = [], []
    for label in ("pos", "neg"):
        root = raw_dir / label
        if not root.is_dir():
            raise FileNotFoundError(root)
        for review in sorted(root.iterdir(), key=lambda p: p.name):
            docs.append(_one_line(review.read_text(encoding="utf-8", errors="replace")))
            labels.append(label)
    return _write(Path(out_dir), docs, labels)
