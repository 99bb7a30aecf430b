import numpy as np
import pytest

from salda.classify import fit_centroids, predict
from salda.solver import Projection

from conftest import gaussian_classes, stack_classes


def identity_projection(dim, d=None):
    d = d or dim
    return Projection(np.eye(dim)[:, :d], np.ones(d), d, None)


class TestFitCentroids:
    def test_identity_projection(self, rng):
        reps = rng.normal(size=(3, 4))
        model = fit_centroids(identity_projection(4), reps)
        assert np.array_equal(model.projected_centroids, reps)
        assert model.centroid_source == "mean"

    def test_source_recorded(self, rng):
        reps = rng.normal(size=(2, 3))
        model = fit_centroids(identity_projection(3), reps, "weighted")
        assert model.centroid_source == "weighted"

    def test_rejects_vector(self):
        with pytest.raises(ValueError, match="per class"):
            fit_centroids(identity_projection(3), np.zeros(3))


class TestPredict:
    def test_sample_at_centroid(self, rng):
        reps = rng.normal(size=(3, 4)) * 5
        model = fit_centroids(identity_projection(4), reps)
        assert predict(model, reps).tolist() == [1, 2, 3]

    def test_exact_tie_lowest_class(self):
        model = fit_centroids(identity_projection(1), np.array([[-1.0], [1.0]]))
        assert predict(model, np.array([[0.0]])).tolist() == [1]

    def test_duplicate_centroids_tie(self, rng):
        rep = rng.normal(size=4)
        model = fit_centroids(identity_projection(4), np.vstack([rep, rep]))
        assert predict(model, rng.normal(size=(5, 4))).tolist() == [1] * 5

    def test_separated_gaussians(self, rng):
        classes = gaussian_classes(rng, np.eye(3) * 20.0, 50, scale=1.0)
        feats, labels = stack_classes(classes)
        means = np.vstack([rows.mean(axis=0) for rows in classes])
        model = fit_centroids(identity_projection(3), means)
        acc = np.mean(predict(model, feats) == labels)
        assert acc >= 0.99

    def test_rotation_invariance(self, rng):
        # a common rigid rotation of the projected space leaves every
        # nearest-centroid decision unchanged
        w = rng.normal(size=(5, 3))
        reps = rng.normal(size=(4, 5))
        samples = rng.normal(size=(50, 5))
        theta = 0.7
        rot = np.eye(3)
        rot[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        p1 = Projection(w, np.ones(3), 3, None)
        p2 = Projection(w @ rot, np.ones(3), 3, None)
        m1 = fit_centroids(p1, reps)
        m2 = fit_centroids(p2, reps)
        assert predict(m1, samples).tolist() == predict(m2, samples).tolist()

    def test_far_class_is_inert(self, rng):
        reps = rng.normal(size=(3, 4))
        samples = rng.normal(size=(30, 4))
        m_near = fit_centroids(identity_projection(4), reps)
        base = predict(m_near, samples)
        far = np.vstack([reps, np.full(4, 1e6)])
        m_far = fit_centroids(identity_projection(4), far)
        assert predict(m_far, samples).tolist() == base.tolist()

    def test_tie_outcome_tracks_class_order(self):
        # swapping the centroid order flips which id wins exact ties
        cents = np.array([[-1.0], [1.0]])
        sample = np.array([[0.0]])
        m12 = fit_centroids(identity_projection(1), cents)
        m21 = fit_centroids(identity_projection(1), cents[::-1])
        assert predict(m12, sample).tolist() == [1]
        assert predict(m21, sample).tolist() == [1]  # still the lower id

    def test_dimension_mismatch(self, rng):
        model = fit_centroids(identity_projection(3), rng.normal(size=(2, 3)))
        with pytest.raises(ValueError, match="dimension"):
            predict(model, np.zeros((2, 5)))

    def test_uniform_saliency_sources_agree(self, rng):
        # when weighted representations equal the plain means the two
        # centroid sources give identical models
        means = rng.normal(size=(3, 4))
        m_mean = fit_centroids(identity_projection(4), means, "mean")
        m_weighted = fit_centroids(identity_projection(4), means, "weighted")
        assert np.array_equal(m_mean.projected_centroids, m_weighted.projected_centroids)
