import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # expose oracles.py


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def gaussian_classes(rng, means, n_per, scale=1.0):
    """List of per-class row matrices drawn around the given means."""
    means = np.atleast_2d(means)
    if np.isscalar(n_per):
        n_per = [n_per] * len(means)
    return [rng.normal(m, scale, (n, means.shape[1])) for m, n in zip(means, n_per)]


def stack_classes(classes):
    """(features, labels 1..C) from a list of per-class row matrices."""
    feats = np.vstack(classes)
    labels = np.concatenate(
        [np.full(len(rows), c + 1, dtype=np.int64) for c, rows in enumerate(classes)]
    )
    return feats, labels


def write_csv(path, features, labels, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row, lab in zip(features, labels):
            w.writerow([repr(float(v)) for v in row] + [lab])
    return str(path)
