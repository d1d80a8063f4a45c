"""Matrix-valued text embeddings on the unit Frobenius sphere."""

from matrep.manifold import (
    DegenerateInputError,
    FlatEmbedding,
    MatrixEmbedding,
    flatten,
    frobenius_norm,
    normalize,
    retract,
    tangent_project,
    unflatten,
)
from matrep.similarity import affinity, dist2, grad_g_wrt_A, sim_g

__version__ = "0.1.0"

__all__ = [
    "DegenerateInputError",
    "FlatEmbedding",
    "MatrixEmbedding",
    "affinity",
    "dist2",
    "flatten",
    "frobenius_norm",
    "grad_g_wrt_A",
    "normalize",
    "retract",
    "sim_g",
    "tangent_project",
    "unflatten",
]
