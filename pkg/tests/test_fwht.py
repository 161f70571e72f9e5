"""Fast Walsh-Hadamard transform against the dense reference."""

import numpy as np
import pytest

from fnnpe.core import derive_rng, standard_normals
from fnnpe.errors import NonPowerOfTwo
from fnnpe.fwht import fwht_inplace, hadamard_matrix, naive_hadamard

SIZES = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]


class TestSmallCases:
    def test_d1_identity(self):
        v = np.array([3.0])
        np.testing.assert_array_equal(fwht_inplace(v.copy()), v)

    def test_d2_by_hand(self):
        """H_2 [a, b] = [(a+b), (a-b)] / sqrt(2)."""
        out = fwht_inplace(np.array([1.0, 2.0]))
        np.testing.assert_allclose(out, np.array([3.0, -1.0]) / np.sqrt(2), rtol=1e-15)

    def test_d4_by_hand(self):
        out = fwht_inplace(np.array([1.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(out, np.full(4, 0.5), rtol=1e-15)

    def test_matrix_rows_orthonormal(self):
        h = hadamard_matrix(16)
        np.testing.assert_allclose(h @ h.T, np.eye(16), atol=1e-14)
        assert np.all(np.abs(h) == 0.25)


class TestAgainstReference:
    @pytest.mark.parametrize("d", SIZES)
    def test_matches_dense(self, d):
        x = standard_normals(derive_rng(1, d), d)
        np.testing.assert_allclose(fwht_inplace(x.copy()), naive_hadamard(x), atol=1e-11)

    @pytest.mark.parametrize("d", [64, 256, 2048])
    def test_isometry(self, d):
        x = standard_normals(derive_rng(2, d), d)
        y = fwht_inplace(x.copy())
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), rel=1e-9)

    @pytest.mark.parametrize("d", [8, 128, 1024])
    def test_involution(self, d):
        """Applying the normalized transform twice gives the input back."""
        x = standard_normals(derive_rng(3, d), d)
        y = fwht_inplace(fwht_inplace(x.copy()))
        np.testing.assert_allclose(y, x, atol=1e-11)


class TestArrayContract:
    def test_in_place_and_returns_same_object(self):
        x = standard_normals(derive_rng(4, 0), 64)
        out = fwht_inplace(x)
        assert out is x

    def test_batch_equals_per_row(self):
        batch = standard_normals(derive_rng(5, 0), (7, 128))
        rows = [fwht_inplace(batch[i].copy()) for i in range(7)]
        fwht_inplace(batch)
        np.testing.assert_allclose(batch, np.stack(rows), atol=1e-12)

    def test_noncontiguous_view(self):
        """Column slices of a wider array transform correctly in place."""
        wide = standard_normals(derive_rng(6, 0), (4, 100))
        view = wide[:, 10:74]
        expected = naive_hadamard(view.copy())
        fwht_inplace(view)
        np.testing.assert_allclose(view, expected, atol=1e-12)

    def test_rejects_non_float64(self):
        with pytest.raises(TypeError):
            fwht_inplace(np.ones(8, dtype=np.float32))
        with pytest.raises(TypeError):
            fwht_inplace(np.ones(8, dtype=np.int64))

    def test_rejects_non_power_of_two(self):
        with pytest.raises(NonPowerOfTwo):
            fwht_inplace(np.ones(12))
        with pytest.raises(NonPowerOfTwo):
            hadamard_matrix(12)
