"""Spectral clustering over matrix embeddings."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from sklearn.cluster import KMeans

from matrep.similarity import pairwise_dist2

log = logging.getLogger(__name__)

DENSE_LIMIT = 5000


def _as_bank(embeddings) -> np.ndarray:
    if isinstance(embeddings, np.ndarray):
        bank = embeddings.astype(np.float64, copy=False)
    else:
        bank = np.stack([np.asarray(e, dtype=np.float64) for e in embeddings])
    if bank.ndim == 2:
        bank = bank[:, :, None]
    return bank


def spectral_embedding(affinity: np.ndarray, k: int) -> np.ndarray:
    """Row-normalized eigenvectors for the k smallest eigenvalues of I - D^-1/2 A D^-1/2."""
    A = np.asarray(affinity, dtype=np.float64)
    n = A.shape[0]
    deg = A.sum(axis=1)
    if np.any(deg <= 0):
        raise ValueError("affinity has rows with zero degree")
    inv_sqrt = 1.0 / np.sqrt(deg)
    M = A * inv_sqrt[:, None] * inv_sqrt[None, :]
    M = 0.5 * (M + M.T)
    if n <= DENSE_LIMIT:
        L = np.eye(n) - M
        _, vecs = scipy.linalg.eigh(L, subset_by_index=[0, k - 1])
    else:
        # smallest eigenvalues of L are the largest of M
        _, vecs = scipy.sparse.linalg.eigsh(M, k=k, which="LA", tol=1e-8, maxiter=10 * n)
        vecs = vecs[:, ::-1]
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return vecs / norms


def spectral_cluster_affinity(
    affinity: np.ndarray, k: int, seed: int = 0, n_init: int = 10, max_iter: int = 300
) -> np.ndarray:
    A = np.asarray(affinity, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("affinity must be square")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    if k == n:
        return np.arange(n, dtype=np.int64)
    X = spectral_embedding(A, k)
    km = KMeans(n_clusters=k, init="k-means++", n_init=n_init, max_iter=max_iter, random_state=seed)
    return km.fit_predict(X).astype(np.int64)


def spectral_cluster(embeddings, k: int, gamma: float = 0.001, seed: int = 0) -> np.ndarray:
    """Cluster embeddings with affinity exp(-gamma * dist2).

    Points whose affinity row is entirely zero (kernel underflow) are left
    out of the eigenproblem and take the label of their nearest clustered
    point.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    bank = _as_bank(embeddings)
    n = bank.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} embeddings, got {n}")
    D2 = pairwise_dist2(bank)
    A = np.exp(-gamma * D2)
    isolated = A.sum(axis=1) == 0
    if not isolated.any():
        return spectral_cluster_affinity(A, k, seed)
    keep = np.flatnonzero(~isolated)
    if keep.size < k:
        raise ValueError("too few connected points for the requested cluster count")
    log.warning("%d embeddings have all-zero affinity; assigning by nearest neighbor", isolated.sum())
    labels = np.empty(n, dtype=np.int64)
    labels[keep] = spectral_cluster_affinity(A[np.ix_(keep, keep)], k, seed)
    for i in np.flatnonzero(isolated):
        labels[i] = labels[keep[np.argmin(D2[i, keep])]]
    return labels


def stratified_subsample(labels: Sequence, size: int, seed: int = 0) -> np.ndarray:
    """Indices of a class-proportional sample of ``size`` items (sorted)."""
    labels = np.asarray(labels)
    n = labels.size
    if size >= n:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    classes, inverse = np.unique(labels, return_inverse=True)
    counts = np.bincount(inverse)
    quota = counts * size / n
    alloc = np.floor(quota).astype(int)
    short = size - alloc.sum()
    alloc[np.argsort(-(quota - alloc), kind="stable")[:short]] += 1
    picked = [
        rng.choice(np.flatnonzero(inverse == c), size=alloc[c], replace=False)
        for c in range(classes.size)
    ]
    return np.sort(np.concatenate(picked))
