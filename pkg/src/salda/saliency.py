"""Per-class sample saliency via a graph-Laplacian quadratic program.

Each class gets a probability vector p solving (D - W + V) q = 1 followed by
clamping and normalization to the simplex; the saliency-weighted class
representation is X_c p.  V penalizes samples that sit closer to a rival
class mean than to their own.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dataset import ClassPartition
from .graph import build_full_graph, build_knn_graph, class_sigma, default_knn_k

__all__ = [
    "SaliencyPrior",
    "SaliencyResult",
    "misclassification_prior",
    "solve_saliency",
    "all_class_saliency",
    "class_representation",
]

CONDITION_LIMIT = 1e12
# Keeps pathological prior ratios (rival mean coinciding with a sample) finite.
PRIOR_CAP = 1e15


@dataclass(frozen=True)
class SaliencyPrior:
    """Nonnegative diagonal prior; zero exactly for samples strictly closest
    to their own class mean."""

    v: np.ndarray


@dataclass(frozen=True)
class SaliencyResult:
    """Normalized saliency probabilities and the weighted class
    representation they induce."""

    p: np.ndarray
    representation: np.ndarray
    h_condition: float
    regularized: bool


def misclassification_prior(x_c, class_means, c):
    """Prior penalties from squared distances to own vs rival class means.

    ``class_means`` is the C x D matrix of plain class means on the same
    standardized space; ``c`` is the 1-based id of this class.  A sample
    strictly closer to its own mean than to every rival gets 0; otherwise
    the ratio own/nearest-rival (so the boundary case own == rival gives 1).
    """
    rows = np.asarray(x_c, dtype=np.float64).T
    means = np.asarray(class_means, dtype=np.float64)
    n_classes = means.shape[0]
    if not 1 <= c <= n_classes:
        raise ValueError(f"class id {c} out of range 1..{n_classes}")
    if n_classes < 2:
        warnings.warn("single-class data: misclassification prior is all zero", stacklevel=2)
        return SaliencyPrior(np.zeros(rows.shape[0]))

    diff = rows[:, None, :] - means[None, :, :]
    sq = np.einsum("ikd,ikd->ik", diff, diff)
    own = sq[:, c - 1]
    rivals = np.delete(sq, c - 1, axis=1)
    nearest = rivals.min(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = own / nearest
    ratio = np.where(own == nearest, 1.0, ratio)  # covers 0/0
    v = np.where(own < nearest, 0.0, np.minimum(ratio, PRIOR_CAP))
    return SaliencyPrior(v)


def solve_saliency(graph, prior, epsilon=0.0):
    """Solve (D - W + V) q = 1, clamp negatives, normalize to sum 1.

    The system matrix is symmetric positive semidefinite; when it is
    singular or its condition exceeds 1e12 a ridge eps*I is added with
    eps = max(epsilon, 1e-8 trace(H)/N_c) and the result is flagged.  The
    class representation is the saliency-weighted sample combination
    ``graph.nodes @ p``.
    """
    v = np.asarray(prior.v, dtype=np.float64)
    n = graph.weights.shape[0]
    if v.shape[0] != n:
        raise ValueError("prior and graph sizes do not match")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    h = graph.laplacian() + np.diag(v)

    q = None
    cond = float(np.linalg.cond(h))
    regularized = not np.isfinite(cond) or cond > CONDITION_LIMIT
    if not regularized:
        try:
            q = scipy.linalg.solve(h, np.ones(n), assume_a="pos")
        except np.linalg.LinAlgError:
            regularized = True
    if regularized:
        eps = max(epsilon, 1e-8 * np.trace(h) / n)
        if eps == 0.0:  # zero-trace H (lone sample with zero prior)
            eps = max(epsilon, 1e-8)
        q = scipy.linalg.solve(h + eps * np.eye(n), np.ones(n), assume_a="pos")

    q = np.maximum(q, 0.0)
    total = q.sum()
    if total <= 0:
        raise ArithmeticError("saliency solve produced a nonpositive vector")
    p = q / total
    rep = np.asarray(graph.nodes, dtype=np.float64) @ p
    return SaliencyResult(p, rep, cond, regularized)


def all_class_saliency(partition, graph_kind="full", kernel_kind="paper", epsilon=0.0, knn_k=None):
    """Saliency for every class of a partition, solved independently.

    ``graph_kind`` selects fully connected or k-NN graphs; for k-NN the
    neighbour count defaults to the harness rule unless ``knn_k`` is given.
    Class means for the prior are computed once from the partition.
    """
    if not isinstance(partition, ClassPartition):
        raise TypeError("expected a ClassPartition")
    if graph_kind not in ("full", "knn"):
        raise ValueError(f"graph_kind must be 'full' or 'knn', got {graph_kind!r}")
    means = partition.class_means()
    results = []
    for c, x_c in enumerate(partition.matrices, start=1):
        try:
            sigma = class_sigma(x_c)
            if graph_kind == "full":
                g = build_full_graph(x_c, sigma, kernel=kernel_kind)
            else:
                k = default_knn_k(x_c.shape[1]) if knn_k is None else knn_k
                g = build_knn_graph(x_c, sigma, k, kernel=kernel_kind)
            prior = misclassification_prior(x_c, means, c)
            results.append(solve_saliency(g, prior, epsilon))
        except Exception as exc:
            raise RuntimeError(f"saliency failed for class {c}: {exc}") from exc
    return results


def class_representation(result):
    """Saliency-weighted class representation X_c p (a convex combination
    of the class samples)."""
    return result.representation
