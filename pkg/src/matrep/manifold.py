"""Primitives for p x r matrices with unit Frobenius norm.

A unit-norm p x r matrix flattened row-major is a point on the unit sphere
in R^{p*r}; optimization happens on that sphere and the matrix view is only
used to evaluate similarities and their gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-9


class DegenerateInputError(ValueError):
    """Raised for inputs that cannot be placed on the sphere (e.g. zero matrices)."""


class ShapeMismatchError(ValueError):
    pass


def frobenius_norm(M) -> float:
    M = np.asarray(M, dtype=np.float64)
    return float(np.sqrt(np.sum(M * M)))


@dataclass(frozen=True)
class MatrixEmbedding:
    """A p x r real matrix of unit Frobenius norm (one word or document)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ShapeMismatchError(f"expected a 2-d matrix, got shape {data.shape}")
        p, r = data.shape
        if r < 1 or p < r:
            raise ShapeMismatchError(f"need 1 <= r <= p, got p={p}, r={r}")
        if not np.all(np.isfinite(data)):
            raise DegenerateInputError("matrix has non-finite entries")
        norm = frobenius_norm(data)
        if abs(norm - 1.0) > UNIT_TOL:
            raise DegenerateInputError(f"Frobenius norm is {norm!r}, expected 1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def r(self) -> int:
        return self.data.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True)
class FlatEmbedding:
    """Row-major flattening of a MatrixEmbedding: a unit vector of length p*r."""

    data: np.ndarray
    p: int
    r: int

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 1 or data.size != self.p * self.r:
            raise ShapeMismatchError(
                f"vector of shape {data.shape} does not match p*r = {self.p * self.r}"
            )
        norm = float(np.linalg.norm(data))
        if abs(norm - 1.0) > UNIT_TOL:
            raise DegenerateInputError(f"vector norm is {norm!r}, expected 1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def normalize(M) -> MatrixEmbedding:
    """Scale ``M`` onto the unit Frobenius sphere.

    Zero matrices are rejected rather than mapped to an arbitrary point.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    if not np.all(np.isfinite(M)):
        raise DegenerateInputError("matrix has non-finite entries")
    norm = frobenius_norm(M)
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize a zero matrix")
    return MatrixEmbedding(M / norm)


def flatten(M: MatrixEmbedding) -> FlatEmbedding:
    # element (i, j) -> index i*r + j
    if not isinstance(M, MatrixEmbedding):
        M = MatrixEmbedding(M)
    return FlatEmbedding(M.data.reshape(-1), M.p, M.r)


def unflatten(v: FlatEmbedding) -> MatrixEmbedding:
    return MatrixEmbedding(np.asarray(v.data).reshape(v.p, v.r))


def _check_unit(x: np.ndarray, what: str = "x") -> None:
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > UNIT_TOL:
        raise DegenerateInputError(f"{what} must have unit norm, got {norm!r}")


def tangent_project(x, g) -> np.ndarray:
    """Remove the radial component of ``g`` at the sphere point ``x``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if x.shape != g.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {g.shape} differ")
    _check_unit(x)
    return g - np.dot(x, g) * x


def retract(x, v, step: float) -> np.ndarray:
    """Move from ``x`` against tangent direction ``v`` and renormalize.

    Returns ``(x - step*v) / ||x - step*v||``. A zero direction returns ``x``
    untouched.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if x.shape != v.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {v.shape} differ")
    if step <= 0:
        raise ValueError("step must be positive")
    _check_unit(x)
    vnorm = float(np.linalg.norm(v))
    if abs(np.dot(x, v)) > UNIT_TOL * max(1.0, vnorm):
        raise ValueError("v is not tangent at x")
    if vnorm == 0.0:
        return x.copy()
    y = x - step * v
    ny = float(np.linalg.norm(y))
    if ny < 1e-15:
        raise DegenerateInputError("retraction collapsed to the origin")
    return y / ny
