"""Small shared numeric helpers for symmetric matrices."""

import numpy as np

__all__ = ["symmetrize", "ridge_amount"]


def symmetrize(m):
    """(M + M^T)/2, killing round-off skew before eigensolves."""
    return 0.5 * (m + m.T)


def ridge_amount(m, rel=1e-6, pd_tol=1e-10):
    """Ridge needed to make a symmetric PSD matrix safely positive definite.

    Returns 0 when the smallest eigenvalue already clears ``pd_tol`` times
    the spectral norm, else ``rel * trace / dim`` (with an absolute floor
    for the all-zero corner case).
    """
    eigs = np.linalg.eigvalsh(m)
    norm = max(abs(eigs[0]), abs(eigs[-1]))
    if norm > 0 and eigs[0] > pd_tol * norm:
        return 0.0
    ridge = rel * np.trace(m) / m.shape[0]
    return ridge if ridge > 0 else rel
