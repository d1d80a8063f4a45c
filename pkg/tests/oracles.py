"""Slow, from-the-definition reference implementations used only by tests.

Nothing here imports the package under test.
"""

import math
from itertools import combinations

import numpy as np


def sim_g_double_sum(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    r1, r2 = A.shape[1], B.shape[1]
    total = 0.0
    for i in range(r1):
        for j in range(r2):
            total += float(np.dot(A[:, i], B[:, j]))
    return total / (r1 * r2)


def dist2_double_loop(U, V):
    r = U.shape[1]
    total = 0.0
    for k in range(r):
        for l in range(r):
            diff = U[:, k] - V[:, l]
            total += float(diff @ diff)
    return total / r**2


def central_difference(f, X, h=1e-6):
    """Entry-wise central-difference gradient of scalar ``f`` at matrix ``X``."""
    X = np.array(X, dtype=float)
    grad = np.zeros_like(X)
    for idx in np.ndindex(X.shape):
        orig = X[idx]
        X[idx] = orig + h
        fp = f(X)
        X[idx] = orig - h
        fm = f(X)
        X[idx] = orig
        grad[idx] = (fp - fm) / (2 * h)
    return grad


def hinge_loss_oracle(V, U, Ns, D, m):
    pos = sim_g_double_sum(V, U) + sim_g_double_sum(U, D)
    return sum(max(0.0, m - pos + sim_g_double_sum(V, N) + sim_g_double_sum(N, D)) for N in Ns)


def purity_oracle(clusters, classes):
    n = len(clusters)
    total = 0
    for c in set(clusters):
        members = [classes[i] for i in range(n) if clusters[i] == c]
        total += max(members.count(k) for k in set(members))
    return total / n


def mi_oracle(clusters, classes):
    n = len(clusters)
    mi = 0.0
    for c in set(clusters):
        for k in set(classes):
            nij = sum(1 for a, b in zip(clusters, classes) if a == c and b == k)
            if nij == 0:
                continue
            ai = clusters.count(c)
            bj = classes.count(k)
            mi += nij / n * math.log(n * nij / (ai * bj))
    return mi


def entropy_oracle(labels):
    n = len(labels)
    return -sum(labels.count(c) / n * math.log(labels.count(c) / n) for c in set(labels))


def nmi_oracle(clusters, classes):
    hc, hk = entropy_oracle(clusters), entropy_oracle(classes)
    if hc == 0 or hk == 0:
        return 0.0
    return mi_oracle(clusters, classes) / ((hc + hk) / 2)


def ari_oracle(clusters, classes):
    """Adjusted Rand index by explicit enumeration of all item pairs."""
    n = len(clusters)
    pairs = list(combinations(range(n), 2))
    same_both = sum(1 for i, j in pairs if clusters[i] == clusters[j] and classes[i] == classes[j])
    same_c = sum(1 for i, j in pairs if clusters[i] == clusters[j])
    same_k = sum(1 for i, j in pairs if classes[i] == classes[j])
    expected = same_c * same_k / len(pairs)
    max_index = (same_c + same_k) / 2
    if max_index == expected:
        return 1.0
    return (same_both - expected) / (max_index - expected)


def f1_oracle(pred, gold):
    labels = sorted(set(pred) | set(gold))
    f1s = []
    for c in labels:
        tp = sum(p == c and g == c for p, g in zip(pred, gold))
        pp = sum(p == c for p in pred)
        gp = sum(g == c for g in gold)
        prec = tp / pp if pp else 0.0
        rec = tp / gp if gp else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    # single-label: pooled precision == pooled recall == accuracy
    acc = sum(p == g for p, g in zip(pred, gold)) / len(gold)
    return sum(f1s) / len(f1s), acc


def pearson_oracle(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)
