"""Nearest-neighbor tables and doubling-constant estimation."""

import itertools

import numpy as np
import pytest

from fnnpe.core import derive_rng, make_dataset, standard_normals
from fnnpe.errors import TooLarge
from fnnpe.metrics import (
    brute_force_nn,
    doubling_constant_exact,
    doubling_constant_greedy,
)


def _embed_rows(rows):
    """Pad short integer rows into a dataset without touching distances."""
    return make_dataset(np.asarray(rows, dtype=np.float64))


def _oracle_doubling(points):
    """Independent exhaustive check: try every center, every pairwise
    radius, and every subset of centers for the half-radius cover."""
    n = len(points)
    dist = np.linalg.norm(points[:, None] - points[None, :], axis=2)
    radii = sorted(set(dist[np.triu_indices(n, 1)]) - {0.0})
    best = 1
    for c in range(n):
        for r in radii:
            ball = np.where(dist[c] <= r + 1e-9)[0]
            if len(ball) <= best:
                continue
            # smallest number of half-radius balls covering `ball`,
            # centers drawn from the whole set
            for size in range(1, len(ball) + 1):
                done = False
                for centers in itertools.combinations(range(n), size):
                    cov = np.zeros(len(ball), dtype=bool)
                    for cc in centers:
                        cov |= dist[cc][ball] <= r / 2 + 1e-9
                    if cov.all():
                        done = True
                        break
                if done:
                    best = max(best, size)
                    break
    return best


class TestBruteForceNn:
    def test_hand_case(self):
        ds = _embed_rows([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
        table = brute_force_nn(ds)
        np.testing.assert_array_equal(table.nn_index, [1, 0, 1])
        np.testing.assert_allclose(table.nn_distance, [1.0, 1.0, 4.0])

    def test_tie_goes_to_smallest_index(self):
        ds = _embed_rows([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        table = brute_force_nn(ds)
        assert table.nn_index[0] == 1

    def test_matches_naive_loop(self):
        pts = standard_normals(derive_rng(1, 0), (40, 8))
        ds = make_dataset(pts)
        table = brute_force_nn(ds)
        for i in range(ds.n):
            dists = np.linalg.norm(ds.points - ds.points[i], axis=1)
            dists[i] = np.inf
            assert table.nn_index[i] == np.argmin(dists)
            assert table.nn_distance[i] == pytest.approx(dists.min())


class TestDoublingExact:
    def test_two_points(self):
        """Two points: the ball around either at the pairwise distance
        holds both, and no single half-radius ball can."""
        est = doubling_constant_exact(_embed_rows([[0.0, 0.0], [1.0, 0.0]]))
        assert est.value == 2
        assert est.is_exact

    def test_single_cluster_of_identical_points(self):
        est = doubling_constant_exact(_embed_rows([[1.0, 1.0]] * 4))
        assert est.value == 1

    def test_matches_independent_oracle(self):
        for trial in range(12):
            n = int(derive_rng(2, trial).integers(2, 8))
            pts = standard_normals(derive_rng(3, trial), (n, 3))
            ds = make_dataset(pts)
            est = doubling_constant_exact(ds)
            assert est.value == _oracle_doubling(ds.points), f"trial {trial}"

    def test_witness_is_consistent(self):
        ds = make_dataset(standard_normals(derive_rng(4, 0), (8, 4)))
        est = doubling_constant_exact(ds)
        center, radius, size = est.witness
        assert 0 <= center < ds.n
        assert size == est.value
        assert radius in est.radii_probed

    def test_too_large(self):
        ds = make_dataset(standard_normals(derive_rng(5, 0), (17, 4)))
        with pytest.raises(TooLarge):
            doubling_constant_exact(ds)


class TestDoublingGreedy:
    def test_upper_bounds_exact(self):
        """The greedy cover can only use more balls than the optimum."""
        for trial in range(20):
            n = int(derive_rng(6, trial).integers(2, 10))
            pts = standard_normals(derive_rng(7, trial), (n, 3))
            ds = make_dataset(pts)
            exact = doubling_constant_exact(ds).value
            greedy = doubling_constant_greedy(ds).value
            assert greedy >= exact, f"trial {trial}"

    def test_two_point_case(self):
        est = doubling_constant_greedy(_embed_rows([[0.0, 0.0], [3.0, 4.0]]))
        assert est.value == 2
        assert not est.is_exact

    def test_degenerate_all_equal(self):
        est = doubling_constant_greedy(_embed_rows([[2.0, 2.0]] * 3))
        assert est.value == 1

    def test_deterministic(self):
        ds = make_dataset(standard_normals(derive_rng(8, 0), (200, 8)))
        a = doubling_constant_greedy(ds, seed=3)
        b = doubling_constant_greedy(ds, seed=3)
        assert a == b

    def test_scales_to_larger_sets(self):
        """A near-uniform cloud in 3 coordinates should have a modest
        doubling constant, far below the trivial bound n."""
        pts = standard_normals(derive_rng(9, 0), (300, 3))
        ds = make_dataset(pts)
        est = doubling_constant_greedy(ds)
        assert 2 <= est.value <= 64
