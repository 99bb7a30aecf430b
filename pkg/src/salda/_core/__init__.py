"""Numeric kernel dispatch.

At import time the compiled Cython extension is preferred; failing that, the
numpy implementation takes over.  ``SALDA_PURE_PYTHON=1`` in the environment
forces the fallback (used by the benchmark and the backend-equality tests).
``BACKEND`` records which one is active.
"""

import os

import numpy as np

if os.environ.get("SALDA_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"


def _as_c_f64(a, ndim):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got {a.ndim}-d")
    return a


def pairwise_dists(x):
    """Euclidean distance matrix between the rows of ``x`` (n, d) -> (n, n)."""
    return _impl.pairwise_dists(_as_c_f64(x, 2))


def heat_weights(dists, sigma, squared=False):
    """Heat-kernel weight matrix from a distance matrix; zero diagonal."""
    return _impl.heat_weights(_as_c_f64(dists, 2), float(sigma), bool(squared))


def weighted_scatter(x, center, weights):
    """sum_k w_k (x_k - center)(x_k - center)^T for rows x_k of ``x``."""
    x = _as_c_f64(x, 2)
    center = _as_c_f64(center, 1)
    weights = _as_c_f64(weights, 1)
    if center.shape[0] != x.shape[1]:
        raise ValueError("center length must match the feature dimension")
    if weights.shape[0] != x.shape[0]:
        raise ValueError("one weight per row required")
    return _impl.weighted_scatter(x, center, weights)
