"""Per-class affinity graphs with the heat kernel.

Graphs are dense and small (one per class), symmetric, zero-diagonal.  The
default kernel exponent uses the plain Euclidean distance; ``kernel=
"squared"`` switches to the conventional squared-distance form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._core import heat_weights, pairwise_dists

__all__ = [
    "AffinityGraph",
    "class_sigma",
    "build_full_graph",
    "build_knn_graph",
    "default_knn_k",
]

KERNELS = ("paper", "squared")


@dataclass(frozen=True)
class AffinityGraph:
    """Symmetric nonnegative weight matrix with its degree vector.

    ``nodes`` keeps the class sample matrix (features x samples) the graph
    was built from, so downstream solves can map node weights back to
    feature space.
    """

    weights: np.ndarray
    degrees: np.ndarray
    sigma: float
    kind: str  # "full" or "knn"
    nodes: np.ndarray = None
    k: int | None = None

    @property
    def n_nodes(self):
        return self.weights.shape[0]

    def laplacian(self):
        """Degree matrix minus weights."""
        return np.diag(self.degrees) - self.weights


def _samples_as_rows(x_c):
    x_c = np.asarray(x_c, dtype=np.float64)
    if x_c.ndim != 2:
        raise ValueError("class matrix must be 2-d (features x samples)")
    return x_c.T


def class_sigma(x_c):
    """Mean Euclidean distance over unordered sample pairs of one class.

    Degenerate classes (a single sample, or all samples identical) get the
    fallback value 1 so the heat kernel stays well defined.
    """
    rows = _samples_as_rows(x_c)
    n = rows.shape[0]
    if n < 2:
        return 1.0
    dists = pairwise_dists(rows)
    sigma = float(dists[np.triu_indices(n, k=1)].mean())
    if sigma == 0.0:
        warnings.warn("all class samples identical; using sigma = 1", stacklevel=2)
        return 1.0
    return sigma


def _check_kernel(kernel):
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")


def build_full_graph(x_c, sigma, kernel="paper"):
    """Fully connected heat-kernel graph over the samples of one class."""
    _check_kernel(kernel)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rows = _samples_as_rows(x_c)
    w = heat_weights(pairwise_dists(rows), sigma, squared=(kernel == "squared"))
    return AffinityGraph(w, w.sum(axis=1), float(sigma), "full", nodes=rows.T)


def _neighbor_ranking(dists):
    # Stable argsort on each row: equal distances rank by lower sample index.
    n = dists.shape[0]
    masked = dists.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argsort(masked, axis=1, kind="stable")[:, : n - 1]


def build_knn_graph(x_c, sigma, k, kernel="paper"):
    """k-nearest-neighbour heat-kernel graph, OR-symmetrized.

    An edge (i, j) is kept when j is among i's k nearest samples or vice
    versa.  Distance ties at the k-th neighbour break toward the lower
    sample index, which also makes the edge set nested in k.  ``k`` is
    clamped to [1, N_c - 1]; a single-sample class yields an empty graph.
    """
    _check_kernel(kernel)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rows = _samples_as_rows(x_c)
    n = rows.shape[0]
    if n < 2:
        w = np.zeros((n, n))
        return AffinityGraph(w, w.sum(axis=1), float(sigma), "knn", nodes=rows.T, k=0)
    k = int(min(max(k, 1), n - 1))
    dists = pairwise_dists(rows)
    ranking = _neighbor_ranking(dists)[:, :k]
    keep = np.zeros((n, n), dtype=bool)
    rows_idx = np.repeat(np.arange(n), k)
    keep[rows_idx, ranking.ravel()] = True
    keep |= keep.T
    w = heat_weights(dists, sigma, squared=(kernel == "squared"))
    w[~keep] = 0.0
    return AffinityGraph(w, w.sum(axis=1), float(sigma), "knn", nodes=rows.T, k=k)


def default_knn_k(n_c):
    """Neighbour count rule used by the experiment harness.

    Reads the published choice "min(5, 0.1 N_c)" as
    max(1, min(5, floor(0.1 N_c))), clamped to N_c - 1.
    """
    if n_c < 2:
        return 0
    return max(1, min(5, int(0.1 * n_c), n_c - 1))
