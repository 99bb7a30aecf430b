"""Nearest-centroid classification in the projected space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solver import Projection, project

__all__ = ["CentroidModel", "fit_centroids", "predict"]


@dataclass(frozen=True)
class CentroidModel:
    """One projected centroid per class (row c-1 = class c)."""

    projected_centroids: np.ndarray
    centroid_source: str  # "mean" or "weighted"
    projection: Projection


def fit_centroids(projection, representations, centroid_source="mean"):
    """Project one representation vector per class.

    ``representations`` is a C x D matrix (or list of vectors): plain class
    means or saliency-weighted representations, chosen by the caller and
    recorded in ``centroid_source``.
    """
    reps = np.asarray(representations, dtype=np.float64)
    if reps.ndim != 2:
        raise ValueError("expected one representation vector per class")
    return CentroidModel(project(projection, reps), centroid_source, projection)


def predict(model, samples):
    """Labels (1..C) of the nearest projected centroid, squared Euclidean.

    Ties resolve to the lowest class id.  Samples must already be in the
    same standardized space the projection was trained on.
    """
    z = project(model.projection, np.asarray(samples, dtype=np.float64))
    if z.ndim == 1:
        z = z[None, :]
    diff = z[:, None, :] - model.projected_centroids[None, :, :]
    d2 = np.einsum("scd,scd->sc", diff, diff)
    return d2.argmin(axis=1) + 1
