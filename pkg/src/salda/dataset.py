"""Loading, validation, standardization and fold assignment for labeled
vector data.

All containers here are frozen dataclasses wrapping read-only numpy arrays,
so they can be shared freely across parallel fold workers.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "Standardizer",
    "FoldPlan",
    "ClassPartition",
    "load_csv",
    "fit_standardizer",
    "apply_standardizer",
    "make_folds",
    "partition_by_class",
]


def _freeze(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (rows = samples) with labels re-encoded to 1..C.

    ``label_names`` maps each encoded label back to the original CSV value
    for reporting.
    """

    features: np.ndarray
    labels: np.ndarray
    class_counts: np.ndarray
    label_names: dict = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise ValueError("features must be 2-d")
        if labels.shape != (feats.shape[0],):
            raise ValueError("labels length must match the number of rows")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features contain NaN or Inf")
        counts = np.asarray(self.class_counts, dtype=np.int64)
        c = counts.shape[0]
        if labels.size and (labels.min() < 1 or labels.max() > c):
            raise ValueError("labels must lie in 1..C")
        if np.any(counts < 1):
            raise ValueError("every class needs at least one sample")
        if not np.array_equal(np.bincount(labels, minlength=c + 1)[1:], counts):
            raise ValueError("class_counts inconsistent with labels")
        object.__setattr__(self, "features", _freeze(feats))
        object.__setattr__(self, "labels", _freeze(labels))
        object.__setattr__(self, "class_counts", _freeze(counts))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return self.class_counts.shape[0]


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension centering/scaling fitted on training rows only.

    ``scales`` is 1 for constant dimensions (flagged in ``constant_mask``)
    so applying never divides by zero.  Stddev is the population convention
    (divide by N).
    """

    means: np.ndarray
    scales: np.ndarray
    constant_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "means", _freeze(np.asarray(self.means, dtype=np.float64)))
        object.__setattr__(self, "scales", _freeze(np.asarray(self.scales, dtype=np.float64)))
        object.__setattr__(self, "constant_mask", _freeze(np.asarray(self.constant_mask, dtype=bool)))

    def apply(self, data):
        return apply_standardizer(self, data)

    def invert(self, data):
        """Undo :func:`apply_standardizer` (exact up to round-off)."""
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != self.means.shape[0]:
            raise ValueError("column count does not match the fitted dimension")
        return data * self.scales + self.means


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignment, deterministic in (labels, K, seed)."""

    fold_of_sample: np.ndarray
    n_folds: int
    seed: int

    def __post_init__(self):
        object.__setattr__(
            self, "fold_of_sample", _freeze(np.asarray(self.fold_of_sample, dtype=np.int64))
        )

    def train_test_indices(self, fold):
        """Row indices of the training and test split for one fold."""
        test = np.flatnonzero(self.fold_of_sample == fold)
        train = np.flatnonzero(self.fold_of_sample != fold)
        return train, test

    def to_json(self):
        return json.dumps(
            {
                "fold_of_sample": self.fold_of_sample.tolist(),
                "n_folds": self.n_folds,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(np.array(obj["fold_of_sample"]), obj["n_folds"], obj["seed"])


@dataclass(frozen=True)
class ClassPartition:
    """Per-class sample matrices, columns = samples, plus row-index maps.

    ``matrices[c]`` has shape (D, N_c) and ``indices[c]`` gives each
    column's row in the originating feature matrix.  Class ids are 1..C;
    list position c-1 holds class c.
    """

    matrices: tuple
    indices: tuple

    @property
    def n_classes(self):
        return len(self.matrices)

    def class_sizes(self):
        return np.array([m.shape[1] for m in self.matrices], dtype=np.int64)

    def class_means(self):
        """C x D matrix of plain per-class sample means."""
        return np.vstack([m.mean(axis=1) for m in self.matrices])


def _parse_feature(text, row, col):
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"row {row}: column {col}: cannot parse {text!r} as a number") from None
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"row {row}: column {col}: non-finite value {text!r}")
    return value


def _encode_labels(raw_labels):
    # Sort numerically when every label parses as a number, else as text.
    uniq = sorted(set(raw_labels))
    try:
        uniq = sorted(uniq, key=float)
    except ValueError:
        pass
    code = {name: i + 1 for i, name in enumerate(uniq)}
    encoded = np.array([code[v] for v in raw_labels], dtype=np.int64)
    return encoded, {i + 1: name for i, name in enumerate(uniq)}


def load_csv(path, label_column):
    """Load a comma-separated dataset and encode labels to 1..C.

    ``label_column`` selects the label field by header name (str) or by
    0-based position (int).  The header row is optional when selecting by
    position; with a name it is required.  Every other field must parse as
    a finite real.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty file")

    header = None
    if isinstance(label_column, str):
        header = rows[0]
        if label_column not in header:
            raise ValueError(f"{path}: no column named {label_column!r} in header")
        label_idx = header.index(label_column)
        data_rows = rows[1:]
        start_row = 2
    else:
        label_idx = int(label_column)
        if not -len(rows[0]) <= label_idx < len(rows[0]):
            raise ValueError(f"{path}: label column index {label_idx} out of range")
        label_idx %= len(rows[0])
        # Headerless files start with a fully numeric first row; an empty
        # field is a data error, not a header marker.
        first_feats = [v for i, v in enumerate(rows[0]) if i != label_idx]
        is_header = False
        for v in first_feats:
            try:
                float(v)
            except ValueError:
                if v.strip() != "":
                    is_header = True
        if is_header:
            header = rows[0]
            data_rows = rows[1:]
            start_row = 2
        else:
            data_rows = rows
            start_row = 1

    if not data_rows:
        raise ValueError(f"{path}: no data rows")

    width = len(data_rows[0])
    raw_labels = []
    features = np.empty((len(data_rows), width - 1), dtype=np.float64)
    for r, row in enumerate(data_rows):
        if len(row) != width:
            raise ValueError(f"row {start_row + r}: expected {width} fields, found {len(row)}")
        j = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                if cell.strip() == "":
                    raise ValueError(f"row {start_row + r}: missing label")
                raw_labels.append(cell)
                continue
            if cell.strip() == "":
                raise ValueError(f"row {start_row + r}: column {c}: missing value")
            features[r, j] = _parse_feature(cell, start_row + r, c)
            j += 1

    labels, label_names = _encode_labels(raw_labels)
    counts = np.bincount(labels)[1:]
    return Dataset(features, labels, counts, label_names)


def fit_standardizer(train):
    """Fit per-dimension mean/stddev on a training Dataset (or raw matrix).

    Constant dimensions (stddev below 1e-12) are recorded and given scale 1.
    """
    feats = train.features if isinstance(train, Dataset) else np.asarray(train, dtype=np.float64)
    if feats.shape[0] < 2:
        raise ValueError("standardization needs at least 2 samples")
    means = feats.mean(axis=0)
    stds = feats.std(axis=0)  # population convention (ddof=0)
    constant = stds < 1e-12
    scales = np.where(constant, 1.0, stds)
    return Standardizer(means, scales, constant)


def apply_standardizer(s, data):
    """(data - means) / scales, elementwise per column."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != s.means.shape[0]:
        raise ValueError("column count does not match the fitted dimension")
    return (data - s.means) / s.scales


def make_folds(labels, n_folds, seed):
    """Stratified fold assignment: per class, fold sizes differ by at most 1.

    Samples of each class are shuffled and dealt over a per-class random
    fold order, so the result is deterministic given (labels, K, seed).
    Emits a warning when some class would be absent from a training split.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.shape[0], dtype=np.int64)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = rng.permutation(idx)
        order = rng.permutation(n_folds)
        for i, sample in enumerate(idx):
            fold_of[sample] = order[i % n_folds]

    plan = FoldPlan(fold_of, n_folds, seed)
    for f in range(n_folds):
        train, _ = plan.train_test_indices(f)
        missing = sorted(set(np.unique(labels)) - set(np.unique(labels[train])))
        if missing:
            warnings.warn(
                f"classes {missing} absent from the training split of fold {f}; "
                "training on that fold will fail",
                stacklevel=2,
            )
    return plan


def partition_by_class(train_features, train_labels, n_classes=None):
    """Split training rows into per-class column matrices.

    Labels must cover 1..C; a missing class raises a class-coverage error.
    Within-class sample order follows the original row order.
    """
    feats = np.asarray(train_features, dtype=np.float64)
    labels = np.asarray(train_labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(labels.max()) if labels.size else 0
    matrices = []
    indices = []
    for c in range(1, n_classes + 1):
        idx = np.flatnonzero(labels == c)
        if idx.size == 0:
            raise ValueError(f"class {c} has no samples in this training split")
        matrices.append(_freeze(feats[idx].T.copy()))
        indices.append(_freeze(idx))
    return ClassPartition(tuple(matrices), tuple(indices))
