"""Scatter-matrix construction.

Covers the classical within/between pair, three weighted baselines (pairwise
between-class weighting, relevance-weighted within, discriminant-criterion
weighting), and the saliency-weighted variants: two within-class forms
(selector digit j) and four between-class forms (selector digit i).

Conventions, fixed across the module:
  * class sample matrices are features x samples (columns = samples);
  * within-class deviations are taken from the plain class mean, between
    forms i in {2,3,4} use the saliency-weighted representations;
  * the ordered double sum in the pairwise-representation form is kept as
    is (each unordered pair counted twice);
  * weighted baselines keep their printed count/prior asymmetry: the
    between form uses raw class sizes n_c n_j, the within form uses priors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._core import weighted_scatter
from .linalg import ridge_amount, symmetrize

__all__ = [
    "ClassStats",
    "ScatterPair",
    "VARIANTS",
    "parse_variant",
    "compute_class_stats",
    "classic_scatters",
    "loog_between",
    "tang_within",
    "jarchi_delta",
    "jarchi_scatters",
    "swlda_within",
    "swlda_between",
    "assemble",
    "inverse_distance_weight",
]

BASELINES = ("lda", "loog", "tang", "jarchi")
SWLDA_VARIANTS = tuple(f"swlda_{i}{j}" for i in (1, 2, 3, 4) for j in (1, 2))
VARIANTS = BASELINES + SWLDA_VARIANTS


@dataclass(frozen=True)
class ClassStats:
    """Per-class means/counts/priors plus pairwise mean distances.

    ``mean_dists[i, c]`` is the Euclidean distance between the means of
    classes i+1 and c+1; ``relevance[c]`` sums the reciprocal distances to
    the other class means and is NaN when two class means coincide.
    """

    means: np.ndarray  # C x D
    counts: np.ndarray  # C
    priors: np.ndarray  # C, counts / N
    total_mean: np.ndarray  # D
    mean_dists: np.ndarray  # C x C
    relevance: np.ndarray  # C

    @property
    def n_classes(self):
        return self.means.shape[0]

    @property
    def n_features(self):
        return self.means.shape[1]

    def require_distinct_means(self, what):
        if np.any(np.isnan(self.relevance)):
            raise ValueError(f"{what} undefined: two class means coincide")


@dataclass(frozen=True)
class ScatterPair:
    """Between/within scatter pair with their sum.

    ``pencil`` records which denominator the eigensolver should use:
    "total" for the criterion ratio against s_t = s_b + s_w, "within" for
    the classical ratio against s_w alone.
    """

    s_b: np.ndarray
    s_w: np.ndarray
    s_t: np.ndarray
    variant_id: str
    n_classes: int
    pencil: str = "total"


def parse_variant(selector):
    """Split a variant selector into ("swlda", i, j) or ("baseline", name)."""
    if selector in BASELINES:
        return ("baseline", selector)
    if selector in SWLDA_VARIANTS:
        return ("swlda", int(selector[-2]), int(selector[-1]))
    raise ValueError(f"unknown variant {selector!r}; choose from {VARIANTS}")


def inverse_distance_weight(distance):
    """Default pairwise dissimilarity weight 1/L, shrinking far pairs."""
    return 1.0 / distance


def compute_class_stats(partition):
    """Class means, counts, priors, total mean and pairwise mean distances."""
    means = partition.class_means()
    counts = partition.class_sizes().astype(np.float64)
    n = counts.sum()
    priors = counts / n
    total_mean = (counts @ means) / n
    diff = means[:, None, :] - means[None, :, :]
    dists = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = ~np.eye(len(counts), dtype=bool)
    with np.errstate(divide="ignore"):
        inv = np.where(off, 1.0 / dists, 0.0)
    relevance = np.where(np.isfinite(inv).all(axis=1), inv.sum(axis=1), np.nan)
    return ClassStats(means, counts, priors, total_mean, dists, relevance)


def _class_rows(partition, c):
    # samples of class c as rows
    return partition.matrices[c - 1].T


def classic_scatters(partition, stats):
    """Unweighted within/between scatter pair."""
    d = stats.n_features
    s_w = np.zeros((d, d))
    for c in range(1, stats.n_classes + 1):
        rows = _class_rows(partition, c)
        s_w += weighted_scatter(rows, stats.means[c - 1], np.ones(rows.shape[0]))
    s_b = weighted_scatter(stats.means, stats.total_mean, stats.counts)
    return ScatterPair(s_b, s_w, s_b + s_w, "lda", stats.n_classes, pencil="within")


def loog_between(stats, dissimilarity=inverse_distance_weight):
    """Pairwise between-class scatter with injected dissimilarity weights.

    Sums L(d_cj) * prior_c * prior_j * outer(mu_c - mu_j) over unordered
    class pairs.  A reciprocal-style weight on coincident class means is
    rejected.
    """
    c_n = stats.n_classes
    if c_n < 2:
        raise ValueError("pairwise between-class scatter needs at least 2 classes")
    out = np.zeros((stats.n_features, stats.n_features))
    for c in range(c_n - 1):
        for j in range(c + 1, c_n):
            with np.errstate(divide="ignore"):
                weight = dissimilarity(stats.mean_dists[c, j])
            if not np.isfinite(weight):
                raise ValueError(
                    f"infinite dissimilarity weight for classes {c + 1} and {j + 1}"
                )
            diff = stats.means[c] - stats.means[j]
            out += weight * stats.priors[c] * stats.priors[j] * np.outer(diff, diff)
    return out


def tang_within(partition, stats):
    """Relevance-weighted within-class scatter.

    Each class block is scaled by its prior times the sum of reciprocal
    distances to the other class means, so well-separated classes
    contribute less.
    """
    stats.require_distinct_means("relevance weights")
    d = stats.n_features
    out = np.zeros((d, d))
    for c in range(1, stats.n_classes + 1):
        rows = _class_rows(partition, c)
        scale = stats.priors[c - 1] * stats.relevance[c - 1]
        out += weighted_scatter(rows, stats.means[c - 1], np.full(rows.shape[0], scale))
    return out


def jarchi_delta(stats, classic, c, j):
    """Separability of a class pair in its own discriminant direction.

    Solves w = S_T^{-1}(mu_c - mu_j) against the total scatter of the
    classic pair (ridged when singular) and returns the Rayleigh-style
    ratio of the pairwise between-scatter to the total scatter along w.
    Symmetric in (c, j); zero exactly when the two means coincide.
    """
    s_t = classic.s_t
    ridge = ridge_amount(s_t)
    if ridge:
        s_t = s_t + ridge * np.eye(s_t.shape[0])
    diff = stats.means[c - 1] - stats.means[j - 1]
    w = np.linalg.solve(s_t, diff)
    denom = w @ s_t @ w
    if denom == 0.0:
        return 0.0
    return float((w @ diff) ** 2 / denom)


def jarchi_scatters(partition, stats, deltas):
    """Scatter pair weighted by inverse pair-separability.

    ``deltas`` is the symmetric C x C matrix from :func:`jarchi_delta`.
    Between: sum over unordered pairs of n_c n_j / delta_cj times the mean
    outer product.  Within: class blocks scaled by the prior over the sum
    of that class's deltas.  A zero delta (coincident means) is degenerate.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    c_n = stats.n_classes
    d = stats.n_features
    off = ~np.eye(c_n, dtype=bool)
    if np.any(deltas[off] == 0.0):
        raise ValueError("degenerate class pair: zero separability delta")

    s_b = np.zeros((d, d))
    for c in range(c_n - 1):
        for j in range(c + 1, c_n):
            diff = stats.means[c] - stats.means[j]
            s_b += (stats.counts[c] * stats.counts[j] / deltas[c, j]) * np.outer(diff, diff)

    s_w = np.zeros((d, d))
    row_sums = np.where(off, deltas, 0.0).sum(axis=1)
    for c in range(1, c_n + 1):
        rows = _class_rows(partition, c)
        scale = stats.priors[c - 1] / row_sums[c - 1]
        s_w += weighted_scatter(rows, stats.means[c - 1], np.full(rows.shape[0], scale))
    return ScatterPair(s_b, s_w, s_b + s_w, "jarchi", c_n, pencil="total")


def swlda_within(partition, stats, saliency, j):
    """Saliency-weighted within-class scatter.

    j=1 weights each sample's deviation from its class mean by the sample's
    saliency probability; j=2 additionally scales each class block by its
    relevance weight.
    """
    if j not in (1, 2):
        raise ValueError("within-class form j must be 1 or 2")
    if j == 2:
        stats.require_distinct_means("relevance weights")
    d = stats.n_features
    out = np.zeros((d, d))
    for c in range(1, stats.n_classes + 1):
        rows = _class_rows(partition, c)
        w = np.asarray(saliency[c - 1].p, dtype=np.float64)
        if j == 2:
            w = w * stats.relevance[c - 1]
        out += weighted_scatter(rows, stats.means[c - 1], w)
    return out


def swlda_between(partition, stats, saliency, i):
    """Saliency-weighted between-class scatter, four forms.

    i=1 is the classical count-weighted form around the total mean; i=2
    scatters the weighted class representations around the total mean
    (no count factor); i=3 sums outer products of representation
    differences over all ordered pairs; i=4 scatters every sample against
    the other classes' representations, weighted by sample saliency.
    """
    if i not in (1, 2, 3, 4):
        raise ValueError("between-class form i must be in 1..4")
    c_n = stats.n_classes
    d = stats.n_features

    if i == 1:
        return weighted_scatter(stats.means, stats.total_mean, stats.counts)

    reps = np.vstack([s.representation for s in saliency])
    if i == 2:
        return weighted_scatter(reps, stats.total_mean, np.ones(c_n))
    if i == 3:
        out = np.zeros((d, d))
        for c1 in range(c_n):
            for c2 in range(c_n):
                diff = reps[c1] - reps[c2]
                out += np.outer(diff, diff)
        return out
    out = np.zeros((d, d))
    for c1 in range(1, c_n + 1):
        rows = _class_rows(partition, c1)
        p = np.asarray(saliency[c1 - 1].p, dtype=np.float64)
        for c2 in range(c_n):
            if c2 == c1 - 1:
                continue
            out += weighted_scatter(rows, reps[c2], p)
    return out


def assemble(variant, partition, stats=None, saliency=None):
    """Build the full scatter pair for a variant selector.

    Computes whatever sub-matrices the variant needs, re-symmetrizes them,
    and records which pencil denominator the solver should use (the
    classical baseline keeps its own within-class ratio; every weighted
    method uses the total-scatter form).
    """
    kind = parse_variant(variant)
    if stats is None:
        stats = compute_class_stats(partition)

    if kind[0] == "baseline":
        name = kind[1]
        if name == "lda":
            pair = classic_scatters(partition, stats)
        elif name == "loog":
            s_b = loog_between(stats)
            s_w = classic_scatters(partition, stats).s_w
            pair = ScatterPair(s_b, s_w, s_b + s_w, "loog", stats.n_classes, pencil="total")
        elif name == "tang":
            s_b = loog_between(stats)
            s_w = tang_within(partition, stats)
            pair = ScatterPair(s_b, s_w, s_b + s_w, "tang", stats.n_classes, pencil="total")
        else:  # jarchi
            classic = classic_scatters(partition, stats)
            c_n = stats.n_classes
            deltas = np.zeros((c_n, c_n))
            for c in range(1, c_n + 1):
                for j in range(c + 1, c_n + 1):
                    deltas[c - 1, j - 1] = deltas[j - 1, c - 1] = jarchi_delta(
                        stats, classic, c, j
                    )
            pair = jarchi_scatters(partition, stats, deltas)
    else:
        _, i, j = kind
        if saliency is None:
            raise ValueError(f"variant {variant!r} needs per-class saliency results")
        s_b = swlda_between(partition, stats, saliency, i)
        s_w = swlda_within(partition, stats, saliency, j)
        pair = ScatterPair(s_b, s_w, s_b + s_w, variant, stats.n_classes, pencil="total")

    s_b = symmetrize(pair.s_b)
    s_w = symmetrize(pair.s_w)
    return ScatterPair(s_b, s_w, s_b + s_w, pair.variant_id, pair.n_classes, pair.pencil)
