"""Plumbing checks for the named verification scenarios.

These run the suites at toy scale to pin their payload structure and
determinism; the published parameters are exercised by the acceptance
tests, which are the slow ones.
"""

import numpy as np
import pytest

from fnnpe.metrics import doubling_constant_greedy
from fnnpe.suites import (
    SUITE_NAMES,
    gaussian_dataset,
    planted_plane_dataset,
    run_distortion_suite,
    run_gaussian_appendix_suite,
    run_shrinkage_suite,
    run_smoothness_suite,
    run_suite,
    run_zi_suite,
)


class TestDatasets:
    def test_gaussian_shape_and_determinism(self):
        a = gaussian_dataset(10, 64, seed=3)
        b = gaussian_dataset(10, 64, seed=3)
        assert a.n == 10 and a.d == 64
        np.testing.assert_array_equal(a.points, b.points)
        assert (a.points != gaussian_dataset(10, 64, seed=4).points).any()

    def test_planted_plane_is_nearly_flat(self):
        """With tiny noise the points sit close to a 2-d affine slice:
        centered points are almost entirely explained by two singular
        directions."""
        ds = planted_plane_dataset(60, 128, noise=0.01, seed=1)
        centered = ds.points - ds.points.mean(axis=0)
        sv = np.linalg.svd(centered, compute_uv=False)
        assert sv[2] / sv[0] < 0.05

    def test_planted_plane_doubling_is_modest(self):
        ds = planted_plane_dataset(200, 128, noise=0.01, seed=2)
        est = doubling_constant_greedy(ds)
        assert est.value <= 32  # far below the n it could reach


class TestSuiteRuns:
    def test_smoothness_payload(self):
        out = run_smoothness_suite(n=8, d=64, n_diagonals=25, seed=0)
        assert out["suite"] == "smoothness"
        assert out["failures"] <= 25
        assert 0 <= out["p_hat"] <= 1
        assert out["analytic_bound"] == pytest.approx(0.04151011353411508)
        again = run_smoothness_suite(n=8, d=64, n_diagonals=25, seed=0)
        assert again == out

    def test_zi_payload(self):
        out = run_zi_suite(n=32, d=64, k=8, trials=50, seed=0)
        assert out["suite"] == "zi"
        assert out["config"]["q"] == 1.0  # tiny d saturates the density
        assert out["failures"] == 0 and out["passed"]

    def test_distortion_payload_without_sweep(self):
        out = run_distortion_suite(n=8, d=64, trials=40, k_grid=(), seed=0)
        assert out["exponent_ok"] and np.isnan(out["sweep_slope"])
        assert out["passed"] == out["headline_ok"]
        assert out["config"]["k"] == 13

    def test_distortion_sweep_shape(self):
        out = run_distortion_suite(n=8, d=64, trials=40, k_grid=(2, 6), seed=0)
        assert [row["k"] for row in out["sweep"]] == [2, 6]
        xs = [row["x"] for row in out["sweep"]]
        assert xs == [2 * 0.09, 6 * 0.09]

    def test_shrinkage_payload(self):
        out = run_shrinkage_suite(
            eps_grid=(0.3,), k_grid=(4,), n=8, d=64, trials=1500, seed=0
        )
        [cell] = out["cells"]
        assert cell["bound"] == pytest.approx(0.9**4)
        assert out["passed"] == cell["passed"]

    def test_gaussian_appendix_payload(self):
        out = run_gaussian_appendix_suite(n_configs=2, trials=4000, stability_trials=4096, seed=0)
        assert len(out["dominance"]) == 2
        assert len(out["two_stability"]) == 3
        assert out["passed"]

    def test_dispatch(self):
        assert set(SUITE_NAMES) == {
            "smoothness", "zi", "distortion", "shrinkage", "nn", "gaussian-appendix",
        }
        with pytest.raises(ValueError):
            run_suite("nope")
