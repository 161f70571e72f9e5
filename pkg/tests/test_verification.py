"""Empirical verification machinery: smoothness audits, Monte-Carlo
frequency estimates, and the neighbor-preservation report."""

import dataclasses
import math

import numpy as np
import pytest

from fnnpe.core import derive_rng, make_dataset, select_params, standard_normals
from fnnpe.errors import DomainError, SizeMismatch, TooLarge, ZeroVector
from fnnpe.fjlt import SparseProjection, sample_sign_diagonal
from fnnpe.fwht import naive_hadamard
from fnnpe.verification import (
    McEstimate,
    check_smoothness,
    dominance_holds,
    max_threads,
    mc_distortion,
    mc_gaussian_dominance,
    mc_shrinkage,
    mc_two_stability,
    mc_zi_concentration,
    sample_smooth_diagonal,
    smooth_unit_vector,
    verify_nn_preservation,
    zi_report,
)

PARAMS = select_params(64, 256, 0.5, 0.1, 2.0)

# frozen standard normal CDF values: P(|g| <= 1) and P(|g| <= 1/2)
PHI_WITHIN_1 = 0.6826894921370859
PHI_WITHIN_HALF = 0.3829249225480262


class TestThreadConfig:
    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("FNNPE_THREADS", raising=False)
        assert max_threads() == 1

    def test_reads_env(self, monkeypatch):
        monkeypatch.setenv("FNNPE_THREADS", "3")
        assert max_threads() == 3

    def test_garbage_falls_back(self, monkeypatch):
        monkeypatch.setenv("FNNPE_THREADS", "many")
        assert max_threads() == 1
        monkeypatch.setenv("FNNPE_THREADS", "0")
        assert max_threads() == 1


class TestMcEstimate:
    def test_basic_stats(self):
        est = McEstimate(trials=400, successes=100)
        assert est.p_hat == 0.25
        assert est.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 400))
        with pytest.raises(DomainError):
            est.within_bound()

    def test_within_bound(self):
        from fnnpe.bounds import TailBound

        bound = TailBound(value=0.2, formula_id="x", inputs={}, raw=0.2)
        assert McEstimate(400, 80, bound).within_bound()
        assert not McEstimate(400, 200, bound).within_bound()


class TestCheckSmoothness:
    def test_matches_naive_oracle(self):
        ds = make_dataset(standard_normals(derive_rng(1, 0), (5, 8)))
        diag = sample_sign_diagonal(8, derive_rng(1, 1))
        report = check_smoothness(diag, ds, s=0.9)

        pts = np.vstack([ds.points, np.zeros(8)])
        worst = 0.0
        for i in range(6):
            for j in range(i + 1, 6):
                diff = pts[i] - pts[j]
                norm = np.linalg.norm(diff)
                if norm == 0:
                    continue
                worst = max(worst, np.abs(naive_hadamard(diff * diag.signs)).max() / norm)
        assert report.max_ratio == pytest.approx(worst, rel=1e-12)
        assert report.is_smooth == (worst <= 0.9)
        assert report.pairs_probed == 15
        assert report.exhaustive

    def test_worst_pair_attains_max(self):
        ds = make_dataset(standard_normals(derive_rng(2, 0), (6, 16)))
        diag = sample_sign_diagonal(16, derive_rng(2, 1))
        report = check_smoothness(diag, ds, s=0.5)
        i, j = report.worst_pair
        pts = np.vstack([ds.points, np.zeros(16)])
        diff = pts[i] - pts[j]
        ratio = np.abs(naive_hadamard(diff * diag.signs)).max() / np.linalg.norm(diff)
        assert ratio == pytest.approx(report.max_ratio, rel=1e-12)

    def test_sampled_mode(self):
        ds = make_dataset(standard_normals(derive_rng(3, 0), (30, 32)))
        diag = sample_sign_diagonal(32, derive_rng(3, 1))
        report = check_smoothness(diag, ds, s=0.9, mode="sampled", pairs=100, seed=5)
        assert not report.exhaustive
        assert 0 < report.pairs_probed <= 100
        again = check_smoothness(diag, ds, s=0.9, mode="sampled", pairs=100, seed=5)
        assert again.max_ratio == report.max_ratio

    def test_errors(self):
        ds = make_dataset(standard_normals(derive_rng(4, 0), (3, 8)))
        diag = sample_sign_diagonal(8, derive_rng(4, 1))
        with pytest.raises(DomainError):
            check_smoothness(diag, ds, s=0.0)
        with pytest.raises(DomainError):
            check_smoothness(diag, ds, s=0.5, mode="bogus")
        with pytest.raises(DomainError):
            check_smoothness(diag, ds, s=0.5, mode="sampled")
        big = make_dataset(np.arange(2001 * 2, dtype=np.float64).reshape(2001, 2))
        bigdiag = sample_sign_diagonal(2, derive_rng(4, 2))
        with pytest.raises(TooLarge):
            check_smoothness(bigdiag, big, s=0.5)


class TestSmoothSampling:
    def test_finds_smooth_diagonal(self):
        ds = make_dataset(standard_normals(derive_rng(5, 0), (10, PARAMS.d)))
        diag, attempt = sample_smooth_diagonal(ds, PARAMS.s, seed=7)
        assert attempt >= 1
        assert check_smoothness(diag, ds, PARAMS.s).is_smooth
        again, attempt2 = sample_smooth_diagonal(ds, PARAMS.s, seed=7)
        assert attempt2 == attempt
        np.testing.assert_array_equal(diag.signs, again.signs)

    def test_gives_up_when_impossible(self):
        # the max coordinate of a transformed unit vector is at least
        # d**-0.5, so s below that can never be met
        ds = make_dataset(standard_normals(derive_rng(6, 0), (4, 4)))
        with pytest.raises(DomainError):
            sample_smooth_diagonal(ds, s=0.3, seed=0, max_tries=5)

    def test_smooth_unit_vector(self):
        v = smooth_unit_vector(64, 0.3, derive_rng(7, 0))
        assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)
        assert np.abs(v).max() <= 0.3
        with pytest.raises(DomainError):
            smooth_unit_vector(16, 0.2, derive_rng(7, 1))  # 0.2 < 16**-0.5


class TestZiReport:
    def _projection(self):
        return SparseProjection(
            k=2, d=4, q=0.5,
            indptr=np.array([0, 2, 3]),
            indices=np.array([0, 2, 1]),
            data=np.array([1.0, -2.0, 0.5]),
        )

    def test_manual_case(self):
        rep = zi_report(self._projection(), np.array([0.6, 0.8, 0.0, 0.0]))
        np.testing.assert_allclose(rep.z_values, [0.36, 0.64])
        assert rep.all_above_half_q  # both >= 0.25

    def test_starved_row_detected(self):
        rep = zi_report(self._projection(), np.array([1.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(rep.z_values, [1.0, 0.0])
        assert not rep.all_above_half_q

    def test_shape_check(self):
        with pytest.raises(DomainError):
            zi_report(self._projection(), np.ones(5))


class TestMcZiConcentration:
    def test_full_density_never_fails(self):
        est = mc_zi_concentration(q=1.0, d=32, k=4, s=0.5, trials=50, seed=0)
        assert est.successes == 0
        assert est.analytic_bound.value == 1 / 20

    def test_deterministic_and_thread_invariant(self, monkeypatch):
        kwargs = dict(q=0.3, d=64, k=8, s=0.4, trials=600, seed=11)
        monkeypatch.setenv("FNNPE_THREADS", "1")
        a = mc_zi_concentration(**kwargs)
        monkeypatch.setenv("FNNPE_THREADS", "2")
        b = mc_zi_concentration(**kwargs)
        assert a.successes == b.successes


class TestMcShrinkage:
    def test_within_analytic_bound(self):
        params = dataclasses.replace(PARAMS, epsilon=0.2, k=8)
        est = mc_shrinkage(params, trials=2000, seed=3)
        assert est.analytic_bound.value == pytest.approx(0.6**8)
        assert est.within_bound()

    def test_deterministic_and_thread_invariant(self, monkeypatch):
        params = dataclasses.replace(PARAMS, epsilon=0.3, k=4)
        monkeypatch.setenv("FNNPE_THREADS", "1")
        a = mc_shrinkage(params, trials=1500, seed=5)
        monkeypatch.setenv("FNNPE_THREADS", "2")
        b = mc_shrinkage(params, trials=1500, seed=5)
        assert a.successes == b.successes


class TestMcDistortion:
    def _setup(self):
        params = select_params(16, 64, 0.5, 0.1, 2.0)
        ds = make_dataset(standard_normals(derive_rng(8, 0), (16, 64)))
        return params, ds

    def test_within_delta_budget(self):
        params, ds = self._setup()
        est = mc_distortion(params, ds, trials=60, seed=1)
        assert est.analytic_bound.value == params.delta
        assert est.within_bound()
        assert est.details["pairs"] == 16 * 17 // 2
        assert est.details["worst_pair_freq"] <= 1.0

    def test_k_override_and_exponent(self):
        params, ds = self._setup()
        est = mc_distortion(params, ds, trials=60, seed=2, k_override=4)
        assert est.details["k"] == 4
        if est.successes:
            assert est.details["fitted_exponent"] < 0

    def test_deterministic_and_thread_invariant(self, monkeypatch):
        params, ds = self._setup()
        monkeypatch.setenv("FNNPE_THREADS", "1")
        a = mc_distortion(params, ds, trials=64, seed=4)
        monkeypatch.setenv("FNNPE_THREADS", "2")
        b = mc_distortion(params, ds, trials=64, seed=4)
        assert a.successes == b.successes

    def test_rejects_width_mismatch(self):
        params, _ = self._setup()
        other = make_dataset(np.ones((4, 128)))
        with pytest.raises(DomainError):
            mc_distortion(params, other, trials=1)


class TestNnPreservation:
    def test_identity_embedding_passes(self):
        ds = make_dataset([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
        report = verify_nn_preservation(ds, ds, epsilon=0.3)
        assert report.p1_flags.all() and report.p2_flags.all()
        assert report.joint_rate == 1.0
        assert report.p2_witnesses == ()

    def test_collapsed_far_point_caught(self):
        """Pulling the far point into the neighborhood breaks property 2
        for both near points, with the offending pair reported."""
        orig = make_dataset([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
        emb = make_dataset([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]])
        report = verify_nn_preservation(orig, emb, epsilon=0.3)
        np.testing.assert_array_equal(report.p1_flags, [True, True, True])
        np.testing.assert_array_equal(report.p2_flags, [False, False, True])
        assert report.joint_rate == pytest.approx(1 / 3)
        assert report.p2_witnesses == ((0, 2, 5.0, 0.5), (1, 2, 4.0, 0.5))

    def test_lost_neighborhood_breaks_p1(self):
        """Blowing up every distance around a point breaks property 1."""
        orig = make_dataset([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        emb = make_dataset([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]])
        report = verify_nn_preservation(orig, emb, epsilon=0.3)
        assert not report.p1_flags.any()

    def test_errors(self):
        ds = make_dataset([[0.0, 0.0], [1.0, 0.0]])
        other = make_dataset([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        with pytest.raises(SizeMismatch):
            verify_nn_preservation(ds, other, epsilon=0.3)
        with pytest.raises(DomainError):
            verify_nn_preservation(ds, ds, epsilon=0.0)


class TestGaussianDominance:
    def test_frozen_single_coordinate_probabilities(self):
        """k=1, unit variance, t=1: the below-threshold probability is
        P(|g| <= 1); quadrupling the variance drops it to P(|g| <= 1/2)."""
        narrow, wide = mc_gaussian_dominance([1.0], [4.0], t=1.0, trials=200_000, seed=0)
        assert narrow.p_hat == pytest.approx(PHI_WITHIN_1, abs=4 * narrow.std_err)
        assert wide.p_hat == pytest.approx(PHI_WITHIN_HALF, abs=4 * wide.std_err)
        assert dominance_holds(narrow, wide)

    def test_equal_variances_tie(self):
        narrow, wide = mc_gaussian_dominance([1.0, 2.0], [1.0, 2.0], t=2.0, trials=50_000, seed=1)
        assert dominance_holds(narrow, wide)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            mc_gaussian_dominance([1.0, 2.0], [1.0], t=1.0, trials=10)
        with pytest.raises(DomainError):
            mc_gaussian_dominance([2.0], [1.0], t=1.0, trials=10)  # y < x
        with pytest.raises(DomainError):
            mc_gaussian_dominance([1.0], [1.0], t=-1.0, trials=10)


class TestTwoStability:
    def test_pythagorean_weights(self):
        report = mc_two_stability([3.0, 4.0], sigma=1.0, trials=20_000, seed=0)
        assert report.expected_variance == pytest.approx(25.0)
        assert report.passed
        assert report.mean_ok and report.variance_ok and report.ks_ok

    def test_mixed_sign_weights(self):
        report = mc_two_stability([2.0, -1.0, 0.5], sigma=2.0, trials=20_000, seed=1)
        assert report.expected_variance == pytest.approx(21.0)
        assert report.passed

    def test_deterministic(self):
        a = mc_two_stability([1.0, 1.0], sigma=1.0, trials=4096, seed=9)
        b = mc_two_stability([1.0, 1.0], sigma=1.0, trials=4096, seed=9)
        assert a.ks_gap == b.ks_gap and a.sample_variance == b.sample_variance

    def test_zero_weights_rejected(self):
        with pytest.raises(ZeroVector):
            mc_two_stability([0.0, 0.0], sigma=1.0, trials=100)
