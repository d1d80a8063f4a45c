"""Reading and writing embedding banks.

Text format: a header ``count p r`` followed by one line per entry, the
token (or document id) and its p*r values in row-major order. The binary
variant keeps the same text header and stores each entry as
``token<space>`` followed by p*r little-endian float32 values and a newline.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

NORM_WARN = 1e-3
NORM_REJECT = 0.1


class EmbeddingFileError(ValueError):
    pass


def write_embeddings(path: str | Path, tokens: Sequence[str], bank: np.ndarray, binary: bool = False) -> None:
    bank = np.asarray(bank, dtype=np.float64)
    if bank.ndim != 3 or bank.shape[0] != len(tokens):
        raise ValueError("bank must have shape (len(tokens), p, r)")
    if any(not str(t) or any(c.isspace() for c in str(t)) for t in tokens):
        raise ValueError("tokens must be nonempty and free of whitespace")
    n, p, r = bank.shape
    flat = bank.reshape(n, p * r)
    with open(path, "wb") as fh:
        fh.write(f"{n} {p} {r}\n".encode())
        if binary:
            data = flat.astype("<f4")
            for tok, row in zip(tokens, data):
                fh.write(str(tok).encode("utf-8") + b" " + row.tobytes() + b"\n")
        else:
            for tok, row in zip(tokens, flat):
                fh.write((str(tok) + " " + " ".join(repr(float(x)) for x in row) + "\n").encode("utf-8"))


def _parse_header(line: bytes) -> tuple[int, int, int]:
    try:
        n, p, r = (int(x) for x in line.split())
    except ValueError:
        raise EmbeddingFileError(f"bad header {line!r}; expected 'count p r'") from None
    if n < 0 or p < 1 or r < 1:
        raise EmbeddingFileError(f"bad header values {n} {p} {r}")
    return n, p, r


def _check_norms(bank: np.ndarray, path) -> None:
    if not np.all(np.isfinite(bank)):
        raise EmbeddingFileError(f"{path}: non-finite values")
    if bank.shape[0] == 0:
        return
    dev = np.abs(np.sqrt(np.einsum("npr,npr->n", bank, bank)) - 1.0)
    worst = float(dev.max())
    if worst > NORM_REJECT:
        raise EmbeddingFileError(f"{path}: entry {int(dev.argmax())} has norm off by {worst:.3g}")
    if worst > NORM_WARN:
        log.warning("%s: norms deviate from 1 by up to %.3g", path, worst)


def read_embeddings(path: str | Path, binary: bool = False) -> tuple[list[str], np.ndarray]:
    """Return (tokens, bank) with bank shaped (count, p, r)."""
    with open(path, "rb") as fh:
        n, p, r = _parse_header(fh.readline())
        d = p * r
        tokens: list[str] = []
        bank = np.empty((n, d), dtype=np.float64)
        if binary:
            width = 4 * d
            for i in range(n):
                tok = bytearray()
                while True:
                    ch = fh.read(1)
                    if not ch:
                        raise EmbeddingFileError(f"{path}: truncated at entry {i} of {n}")
                    if ch == b" ":
                        break
                    tok += ch
                raw = fh.read(width)
                if len(raw) != width:
                    raise EmbeddingFileError(f"{path}: truncated at entry {i} of {n}")
                bank[i] = np.frombuffer(raw, dtype="<f4")
                if fh.read(1) != b"\n":
                    raise EmbeddingFileError(f"{path}: missing record terminator at entry {i}")
                tokens.append(tok.decode("utf-8"))
            if fh.read(1):
                raise EmbeddingFileError(f"{path}: more entries than the header's {n}")
        else:
            i = 0
            for lineno, line in enumerate(fh, start=2):
                parts = line.decode("utf-8").split()
                if not parts:
                    continue
                if i >= n:
                    raise EmbeddingFileError(f"{path}: more entries than the header's {n}")
                if len(parts) != d + 1:
                    raise EmbeddingFileError(
                        f"{path}:{lineno}: expected {d} values, found {len(parts) - 1}"
                    )
                tokens.append(parts[0])
                try:
                    bank[i] = [float(x) for x in parts[1:]]
                except ValueError:
                    raise EmbeddingFileError(f"{path}:{lineno}: unparseable value") from None
                i += 1
            if i != n:
                raise EmbeddingFileError(f"{path}: header says {n} entries, found {i}")
    bank = bank.reshape(n, p, r)
    _check_norms(bank, path)
    return tokens, bank
