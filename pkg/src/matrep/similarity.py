"""Similarity and distance between matrices with arbitrary column counts.

The similarity of A (p x r1) and B (p x r2) is the mean of all column dot
products a_i . b_j, which factors through the column sums:

    g(A, B) = colsum(A) . colsum(B) / (r1 * r2)

Everything here (gradient, squared distance, kernel) is expressed through
that factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from matrep.manifold import ShapeMismatchError


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        return A[:, None]
    if A.ndim != 2:
        raise ShapeMismatchError(f"expected a matrix, got shape {A.shape}")
    return A


@dataclass(frozen=True)
class ColumnSum:
    s: np.ndarray
    r: int

    @classmethod
    def of(cls, A) -> "ColumnSum":
        A = _as_matrix(A)
        return cls(A.sum(axis=1), A.shape[1])


def sim_g(A, B) -> float:
    """Average pairwise column dot product between ``A`` and ``B``."""
    A = _as_matrix(A)
    B = _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ShapeMismatchError(f"row dimensions differ: {A.shape[0]} vs {B.shape[0]}")
    sa = A.sum(axis=1)
    sb = B.sum(axis=1)
    # sa.sb and sb.sa use the same multiply order, so the result is symmetric bit-for-bit
    return float(np.dot(sa, sb)) / (A.shape[1] * B.shape[1])


def grad_g_wrt_A(A, B) -> np.ndarray:
    """Partial derivative of ``sim_g(A, B)`` with respect to ``A``.

    Each column equals colsum(B) / (r1 * r2).
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ShapeMismatchError(f"row dimensions differ: {A.shape[0]} vs {B.shape[0]}")
    r1, r2 = A.shape[1], B.shape[1]
    col = B.sum(axis=1) / (r1 * r2)
    return np.repeat(col[:, None], r1, axis=1)


def dist2(U, V) -> float:
    """Mean squared Euclidean distance over all column pairs of ``U`` and ``V``.

    Only defined for equal shapes. Note that dist2(U, U) is zero only when
    all columns of U coincide.
    """
    U = _as_matrix(U)
    V = _as_matrix(V)
    if U.shape != V.shape:
        raise ShapeMismatchError(f"dist2 needs equal shapes, got {U.shape} and {V.shape}")
    r = U.shape[1]
    diff = U[:, :, None] - V[:, None, :]
    return float(np.sum(diff * diff)) / (r * r)


def affinity(U, V, gamma: float) -> float:
    """RBF-style kernel ``exp(-gamma * dist2(U, V))``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return float(np.exp(-gamma * dist2(U, V)))


# Batched versions over banks shaped (n, p, r).


def bank_colsums(bank: np.ndarray) -> np.ndarray:
    bank = np.asarray(bank, dtype=np.float64)
    if bank.ndim != 3:
        raise ShapeMismatchError(f"expected a bank of shape (n, p, r), got {bank.shape}")
    return bank.sum(axis=2)


def pairwise_sim_g(bank_a: np.ndarray, bank_b: np.ndarray | None = None) -> np.ndarray:
    sa = bank_colsums(bank_a)
    ra = np.asarray(bank_a).shape[2]
    if bank_b is None:
        sb, rb = sa, ra
    else:
        sb = bank_colsums(bank_b)
        rb = np.asarray(bank_b).shape[2]
    if sa.shape[1] != sb.shape[1]:
        raise ShapeMismatchError("row dimensions differ")
    return (sa @ sb.T) / (ra * rb)


def pairwise_dist2(bank_a: np.ndarray, bank_b: np.ndarray | None = None) -> np.ndarray:
    """Matrix of ``dist2`` between every entry of ``bank_a`` and ``bank_b``."""
    bank_a = np.asarray(bank_a, dtype=np.float64)
    bank_b = bank_a if bank_b is None else np.asarray(bank_b, dtype=np.float64)
    if bank_a.ndim != 3 or bank_a.shape[1:] != bank_b.shape[1:]:
        raise ShapeMismatchError(
            f"dist2 needs equal entry shapes, got {bank_a.shape[1:]} and {bank_b.shape[1:]}"
        )
    r = bank_a.shape[2]
    # sum_kl |u_k - v_l|^2 = r*|U|_F^2 + r*|V|_F^2 - 2 colsum(U).colsum(V)
    sq_a = np.einsum("npr,npr->n", bank_a, bank_a)
    sq_b = np.einsum("npr,npr->n", bank_b, bank_b)
    cross = bank_colsums(bank_a) @ bank_colsums(bank_b).T
    d = (r * (sq_a[:, None] + sq_b[None, :]) - 2.0 * cross) / (r * r)
    np.maximum(d, 0.0, out=d)
    return d


def affinity_matrix(bank: np.ndarray, gamma: float) -> np.ndarray:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return np.exp(-gamma * pairwise_dist2(bank))
