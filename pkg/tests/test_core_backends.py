import subprocess
import sys

import numpy as np
import pytest

from salda import _core
from salda._core import _kernels_py

try:
    from salda._core import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

needs_ext = pytest.mark.skipif(_kernels_cy is None, reason="extension not built")


def test_backend_reported():
    assert _core.BACKEND in ("cython", "python")


@needs_ext
class TestBackendAgreement:
    def test_pairwise_dists(self, rng):
        x = np.ascontiguousarray(rng.normal(size=(40, 7)))
        a = _kernels_cy.pairwise_dists(x)
        b = _kernels_py.pairwise_dists(x)
        assert np.abs(a - b).max() < 1e-12

    def test_identical_rows_exact_zero(self, rng):
        x = np.ascontiguousarray(np.tile(rng.normal(size=3), (4, 1)))
        assert _kernels_cy.pairwise_dists(x).max() == 0.0
        assert _kernels_py.pairwise_dists(x).max() == 0.0

    @pytest.mark.parametrize("squared", [False, True])
    def test_heat_weights(self, rng, squared):
        d = np.abs(rng.normal(size=(12, 12)))
        d = np.ascontiguousarray((d + d.T) / 2)
        a = _kernels_cy.heat_weights(d, 1.7, squared)
        b = _kernels_py.heat_weights(d, 1.7, squared)
        assert np.abs(a - b).max() < 1e-15
        assert np.all(np.diag(a) == 0.0)

    def test_weighted_scatter(self, rng):
        x = np.ascontiguousarray(rng.normal(size=(30, 5)))
        c = rng.normal(size=5)
        w = rng.random(30)
        a = _kernels_cy.weighted_scatter(x, c, w)
        b = _kernels_py.weighted_scatter(x, c, w)
        assert np.abs(a - b).max() < 1e-12 * max(1.0, np.abs(a).max())


class TestDispatcher:
    def test_validates_shapes(self, rng):
        with pytest.raises(ValueError, match="2-d"):
            _core.pairwise_dists(np.zeros(3))
        with pytest.raises(ValueError, match="center length"):
            _core.weighted_scatter(np.zeros((2, 3)), np.zeros(2), np.zeros(2))
        with pytest.raises(ValueError, match="one weight per row"):
            _core.weighted_scatter(np.zeros((2, 3)), np.zeros(3), np.zeros(3))

    def test_accepts_noncontiguous(self, rng):
        x = rng.normal(size=(10, 6))[::2]
        out = _core.pairwise_dists(x)
        assert out.shape == (5, 5)

    def test_env_forces_python_backend(self):
        code = "import salda._core as c; print(c.BACKEND)"
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "SALDA_PURE_PYTHON": "1"},
        )
        assert out.stdout.strip() == "python"
