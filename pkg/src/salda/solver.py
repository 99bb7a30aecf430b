"""Discriminant directions via a regularized generalized eigendecomposition.

The trace-ratio criterion is solved through its standard ratio-trace
surrogate: the symmetric-definite pencil (S_b, B + eps*I) where B is the
pair's total scatter (or its within scatter for the classical baseline).
Eigenvectors come back B-orthonormal with a canonical sign, so identical
inputs reproduce identical projections bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import ridge_amount

__all__ = ["Projection", "solve_fisher", "project"]


@dataclass(frozen=True)
class Projection:
    """Learned projection matrix (columns = discriminant directions).

    Columns are orthonormal against the regularized pencil denominator;
    ``eigenvalues`` are sorted descending and lie in [0, 1] for the
    total-scatter pencil.  ``regularization_used`` is the ridge actually
    added (None when the denominator was already positive definite).
    """

    w: np.ndarray
    eigenvalues: np.ndarray
    d: int
    regularization_used: float | None
    pencil: str = "total"

    def to_json(self):
        return json.dumps(
            {
                "w": self.w.tolist(),
                "eigenvalues": self.eigenvalues.tolist(),
                "d": self.d,
                "regularization_used": self.regularization_used,
                "pencil": self.pencil,
            }
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(
            np.array(obj["w"]),
            np.array(obj["eigenvalues"]),
            obj["d"],
            obj["regularization_used"],
            obj["pencil"],
        )


def _numerical_rank(sym_psd):
    eigs = np.linalg.eigvalsh(sym_psd)
    top = eigs[-1]
    if top <= 0:
        return 0
    return int(np.sum(eigs > 1e-10 * top))


def _canonical_signs(vectors):
    # First component clearing the noise floor is made positive.
    out = vectors.copy()
    for col in range(out.shape[1]):
        v = out[:, col]
        scale = np.abs(v).max()
        nz = np.flatnonzero(np.abs(v) > 1e-12 * scale)
        if nz.size and v[nz[0]] < 0:
            out[:, col] = -v
    return out


def solve_fisher(pair, d=None, epsilon=0.0):
    """Top-d generalized eigenpairs of the pair's pencil.

    ``d`` defaults to min(C - 1, rank(S_b), D).  The denominator gets a
    ridge max(epsilon, 1e-6 trace/D) whenever it is not numerically
    positive definite; a caller-provided positive ``epsilon`` is always
    applied.
    """
    s_b = np.asarray(pair.s_b, dtype=np.float64)
    dim = s_b.shape[0]
    denom = pair.s_w if getattr(pair, "pencil", "total") == "within" else pair.s_t
    denom = np.asarray(denom, dtype=np.float64)
    if s_b.shape != denom.shape or s_b.shape[0] != s_b.shape[1]:
        raise ValueError("scatter pair dimensions are inconsistent")
    if not s_b.any():
        raise ValueError("no between-class signal: between-class scatter is zero")

    if d is None:
        d = min(pair.n_classes - 1, _numerical_rank(s_b), dim)
        d = max(d, 1)
    if not 1 <= d <= dim:
        raise ValueError(f"requested dimension {d} outside 1..{dim}")

    eps = max(float(epsilon), ridge_amount(denom))
    b = denom + eps * np.eye(dim) if eps else denom
    eigvals, eigvecs = scipy.linalg.eigh(s_b, b)
    order = np.argsort(eigvals)[::-1][:d]
    w = _canonical_signs(eigvecs[:, order])
    return Projection(
        w,
        eigvals[order],
        d,
        eps if eps else None,
        getattr(pair, "pencil", "total"),
    )


def project(projection, data):
    """Map samples (rows) into the discriminant subspace: rows @ W."""
    data = np.asarray(data, dtype=np.float64)
    single = data.ndim == 1
    if single:
        data = data[None, :]
    if data.shape[1] != projection.w.shape[0]:
        raise ValueError("data dimension does not match the projection")
    out = data @ projection.w
    return out[0] if single else out
