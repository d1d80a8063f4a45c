"""Compiled inner loops for training.

The per-tuple step works entirely with column sums: every Euclidean gradient
of the loss has identical columns, so a gradient is carried as a single
p-vector ``c`` and the tangent projection at a point X reduces to
``<X, c 1^T> = colsum(X) . c``.

Functions here release the GIL so several workers can update the shared
banks concurrently without locks.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def next_u64(state):
    """splitmix64; ``state`` is a length-1 uint64 array updated in place."""
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def uniform(state):
    return float(next_u64(state) >> np.uint64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def randint(state, n):
    k = int(uniform(state) * n)
    return k if k < n else n - 1


@njit(cache=True, nogil=True)
def draw_negative(cdf, state):
    return np.searchsorted(cdf, uniform(state), side="right")


@njit(cache=True, nogil=True)
def _colsum(X, out):
    p, r = X.shape
    for i in range(p):
        s = 0.0
        for j in range(r):
            s += X[i, j]
        out[i] = s


@njit(cache=True, nogil=True)
def _dot(a, b):
    s = 0.0
    for i in range(a.shape[0]):
        s += a[i] * b[i]
    return s


@njit(cache=True, nogil=True)
def riemannian_update(X, c, lr):
    """In-place retraction step of X (p x r) along the broadcast gradient c 1^T."""
    p, r = X.shape
    radial = 0.0
    for i in range(p):
        s = 0.0
        for j in range(r):
            s += X[i, j]
        radial += s * c[i]
    norm2 = 0.0
    for i in range(p):
        for j in range(r):
            y = X[i, j] - lr * (c[i] - radial * X[i, j])
            X[i, j] = y
            norm2 += y * y
    inv = 1.0 / np.sqrt(norm2)
    for i in range(p):
        for j in range(r):
            X[i, j] *= inv


@njit(cache=True, nogil=True)
def sgd_tuple(center, context, docs, u, v, d, negs, n_neg, lr, margin, mean_neg, work, active):
    """One hinge-loss step for positive tuple (u, v, d) and negatives ``negs[:n_neg]``.

    All gradients are taken at the pre-update values; updates are applied to
    V, U, D, then each active negative. Returns the (pre-update) loss.

    ``work`` is scratch space of shape (6 + 2 * n_neg, p); ``active`` holds
    n_neg flags.
    """
    r1 = center.shape[2]
    r2 = docs.shape[2]
    p = center.shape[1]
    cs_u = work[0]
    cs_v = work[1]
    cs_d = work[2]
    g_u = work[3]
    g_v = work[4]
    g_d = work[5]
    _colsum(center[u], cs_u)
    _colsum(context[v], cs_v)
    _colsum(docs[d], cs_d)
    ww = 1.0 / (r1 * r1)
    wd = 1.0 / (r1 * r2)
    pos = _dot(cs_v, cs_u) * ww + _dot(cs_u, cs_d) * wd
    scale = 1.0 / n_neg if mean_neg else 1.0
    for i in range(p):
        g_u[i] = 0.0
        g_v[i] = 0.0
        g_d[i] = 0.0
    loss = 0.0
    any_active = False
    for k in range(n_neg):
        cs_n = work[6 + k]
        g_n = work[6 + n_neg + k]
        _colsum(center[negs[k]], cs_n)
        h = margin - pos + _dot(cs_v, cs_n) * ww + _dot(cs_n, cs_d) * wd
        active[k] = h > 0.0
        if h > 0.0:
            any_active = True
            loss += scale * h
            for i in range(p):
                g_u[i] -= scale * (cs_v[i] * ww + cs_d[i] * wd)
                diff = cs_n[i] - cs_u[i]
                g_v[i] += scale * diff * ww
                g_d[i] += scale * diff * wd
                g_n[i] = scale * (cs_v[i] * ww + cs_d[i] * wd)
    if any_active:
        riemannian_update(context[v], g_v, lr)
        riemannian_update(center[u], g_u, lr)
        riemannian_update(docs[d], g_d, lr)
        for k in range(n_neg):
            if active[k]:
                riemannian_update(center[negs[k]], work[6 + n_neg + k], lr)
    return loss


@njit(cache=True, nogil=True)
def train_shard(
    tokens,
    offsets,
    doc_lo,
    doc_hi,
    keep_prob,
    neg_cdf,
    center,
    context,
    docs,
    margin,
    alpha0,
    min_alpha_frac,
    max_window,
    n_neg,
    mean_neg,
    rng_state,
    progress,
    total_scheduled,
    stats,
):
    """One pass over documents ``doc_lo:doc_hi``.

    ``progress[0]`` counts raw tokens this worker has already processed and
    drives the linear learning-rate decay; ``stats`` accumulates
    (loss_sum, tuple_count).
    """
    p = center.shape[1]
    max_len = 0
    for doc in range(doc_lo, doc_hi):
        n = offsets[doc + 1] - offsets[doc]
        if n > max_len:
            max_len = n
    buf = np.empty(max_len, dtype=np.int32)
    negs = np.empty(n_neg, dtype=np.int64)
    work = np.empty((6 + 2 * n_neg, p), dtype=np.float64)
    active = np.zeros(n_neg, dtype=np.bool_)
    for doc in range(doc_lo, doc_hi):
        start = offsets[doc]
        end = offsets[doc + 1]
        frac = 1.0 - progress[0] / total_scheduled
        if frac < min_alpha_frac:
            frac = min_alpha_frac
        lr = alpha0 * frac
        n = 0
        for t in range(start, end):
            w = tokens[t]
            if keep_prob[w] < 1.0 and uniform(rng_state) >= keep_prob[w]:
                continue
            buf[n] = w
            n += 1
        for i in range(n):
            u = buf[i]
            b = 1 + randint(rng_state, max_window)
            lo = i - b if i - b > 0 else 0
            hi = i + b + 1 if i + b + 1 < n else n
            for j in range(lo, hi):
                if j == i:
                    continue
                for k in range(n_neg):
                    neg = draw_negative(neg_cdf, rng_state)
                    tries = 0
                    while neg == u and tries < 100:
                        neg = draw_negative(neg_cdf, rng_state)
                        tries += 1
                    negs[k] = neg
                stats[0] += sgd_tuple(
                    center, context, docs, u, buf[j], doc, negs, n_neg, lr, margin, mean_neg, work, active
                )
                stats[1] += 1.0
        progress[0] += end - start


@njit(cache=True, nogil=True)
def collect_pairs(tokens, offsets, keep_prob, max_window, rng_state):
    """Replay the window/subsampling stream without training (for inspection)."""
    total = 0
    for doc in range(offsets.shape[0] - 1):
        n = offsets[doc + 1] - offsets[doc]
        total += n * 2 * max_window
    out = np.empty((total, 3), dtype=np.int64)
    m = 0
    buf = np.empty(max(total, 1), dtype=np.int32)
    for doc in range(offsets.shape[0] - 1):
        n = 0
        for t in range(offsets[doc], offsets[doc + 1]):
            w = tokens[t]
            if keep_prob[w] < 1.0 and uniform(rng_state) >= keep_prob[w]:
                continue
            buf[n] = w
            n += 1
        for i in range(n):
            b = 1 + randint(rng_state, max_window)
            lo = i - b if i - b > 0 else 0
            hi = i + b + 1 if i + b + 1 < n else n
            for j in range(lo, hi):
                if j != i:
                    out[m, 0] = buf[i]
                    out[m, 1] = buf[j]
                    out[m, 2] = doc
                    m += 1
    return out[:m]
