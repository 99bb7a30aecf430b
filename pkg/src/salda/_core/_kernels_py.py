"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Semantics match the extension; small floating-point differences from
summation order are possible but stay far below the library's tolerances.
"""

import numpy as np


def pairwise_dists(x):
    """Euclidean distance matrix between the rows of ``x``.

    Uses direct differences so identical rows give exactly 0.
    """
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def heat_weights(dists, sigma, squared):
    """Heat-kernel affinities exp(-d / 2 sigma^2), zero diagonal."""
    d = dists * dists if squared else dists
    w = np.exp(-d / (2.0 * sigma * sigma))
    np.fill_diagonal(w, 0.0)
    return w


def weighted_scatter(x, center, weights):
    """sum_k w_k (x_k - center)(x_k - center)^T over the rows of ``x``."""
    dev = x - center
    return np.einsum("k,ki,kj->ij", weights, dev, dev)
