"""Sampling and application of the sparse fast embedding.

The embedding of a point x is P @ fwht(D * x): a random sign flip per
coordinate, the orthonormal Walsh-Hadamard transform, then a sparse
matrix whose entries are N(0, 1/q) with probability q and zero
otherwise.  Row i of the raw output has unit variance per coordinate,
so the squared norm of the full output concentrates around k times the
input's.  ``FjltTransform.scale`` (= k**-0.5) is the factor that makes
the map norm-preserving in expectation; batch embedding applies it when
asked, while ``apply`` stays the literal matrix product so that tests
can compose it against dense oracles.

Sampling is reproducible: a transform is a pure function of
(params, seed), and the serialized form stores the exact sign and
projection values so a saved transform replays bit-identically anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .core import DataSet, EmbedParams, check_seed, derive_rng, standard_normals
from .errors import DimensionMismatch, DomainError
from .fwht import fwht_inplace

SERIAL_FORMAT = "fnnpe-transform"
SERIAL_VERSION = 1


@dataclass(frozen=True, eq=False)
class SignDiagonal:
    """Diagonal of independent +-1 signs, stored as float64."""

    signs: np.ndarray

    def __post_init__(self):
        s = self.signs
        if s.ndim != 1 or not np.isin(s, (-1.0, 1.0)).all():
            raise DomainError("signs must be a 1-d array of +-1 entries")

    @property
    def d(self) -> int:
        return self.signs.shape[0]


@dataclass(frozen=True, eq=False)
class SparseProjection:
    """k x d sparse Gaussian projection in compressed-row form.

    ``indptr``/``indices``/``data`` follow the usual CSR layout; column
    indices are strictly increasing within each row.  Nonzero values are
    i.i.d. N(0, 1/q).
    """

    k: int
    d: int
    q: float
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        if self.k < 1 or self.d < 1:
            raise DomainError(f"projection shape must be positive, got {self.k} x {self.d}")
        if not 0.0 < self.q <= 1.0:
            raise DomainError(f"density q must lie in (0, 1], got {self.q}")
        if self.indptr.shape != (self.k + 1,) or self.indptr[0] != 0 or self.indptr[-1] != len(self.data):
            raise DomainError("malformed row pointer array")
        if len(self.indices) != len(self.data):
            raise DomainError("indices and data lengths differ")

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    @cached_property
    def _csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.k, self.d))

    def to_csr(self) -> sp.csr_matrix:
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def matvec(self, u: np.ndarray) -> np.ndarray:
        if u.shape[-1] != self.d:
            raise DimensionMismatch(f"vector has length {u.shape[-1]}, projection expects {self.d}")
        return self._csr.dot(u)


@dataclass(frozen=True, eq=False)
class FjltTransform:
    """A sampled embedding: sign diagonal, projection, and provenance."""

    diagonal: SignDiagonal
    projection: SparseProjection
    params: EmbedParams
    seed: int

    @property
    def k(self) -> int:
        return self.projection.k

    @property
    def d(self) -> int:
        return self.projection.d

    @property
    def scale(self) -> float:
        """Factor making the embedding an expected isometry (k**-0.5)."""
        return 1.0 / np.sqrt(self.projection.k)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return apply(self, x)

    def apply_batch(self, dataset: DataSet, normalized: bool = False) -> DataSet:
        return apply_batch(self, dataset, normalized=normalized)


@dataclass(frozen=True, eq=False)
class GaussianTransform:
    """Dense k x d baseline with i.i.d. N(0, 1/k) entries.

    The 1/k variance bakes the normalization in: E||Gx||^2 = ||x||^2.
    """

    matrix: np.ndarray
    seed: int

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.d:
            raise DimensionMismatch(f"point has length {x.shape[-1]}, transform expects {self.d}")
        return x @ self.matrix.T

    def apply_batch(self, dataset: DataSet) -> DataSet:
        emb = self.apply(dataset.points)
        return DataSet(points=emb, d_orig=self.k, labels=dataset.labels)


def sample_sign_diagonal(d: int, rng: np.random.Generator) -> SignDiagonal:
    signs = rng.integers(0, 2, size=d).astype(np.float64) * 2.0 - 1.0
    return SignDiagonal(signs=signs)


def _bernoulli_positions(total: int, q: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes among ``total`` Bernoulli(q) cells.

    Draws geometric gaps instead of scanning every cell, so the cost is
    O(number of successes) in expectation rather than O(total).
    """
    if q >= 1.0:
        return np.arange(total, dtype=np.int64)
    positions = []
    last = -1
    # enough draws to overshoot the end in one round, almost always
    chunk = int(total * q + 10.0 * np.sqrt(total * q) + 16)
    while last < total:
        gaps = rng.geometric(q, size=chunk)
        cum = last + np.cumsum(gaps)
        positions.append(cum)
        last = int(cum[-1])
    flat = np.concatenate(positions) if len(positions) > 1 else positions[0]
    return flat[flat < total]


def sample_sparse_projection(params: EmbedParams, rng: np.random.Generator) -> SparseProjection:
    """Draw the k x d sparse Gaussian projection for ``params``.

    The Bernoulli support is drawn first over the flattened k*d cells
    (geometric skipping keeps this O(nnz) expected), then values are
    filled by inverse-CDF normals scaled to variance 1/q.  Flattened
    positions are increasing, so each row's columns come out sorted.
    """
    k, d, q = params.k, params.d, params.q
    flat = _bernoulli_positions(k * d, q, rng)
    rows = (flat // d).astype(np.int64)
    cols = (flat % d).astype(np.int64)
    data = standard_normals(rng, flat.shape[0]) / np.sqrt(q)
    # rows come out sorted, so row boundaries are a binary search away
    indptr = np.searchsorted(rows, np.arange(k + 1)).astype(np.int64)
    return SparseProjection(k=k, d=d, q=q, indptr=indptr, indices=cols, data=data)


def sample_fjlt(params: EmbedParams, seed: int) -> FjltTransform:
    """Sample the full transform deterministically from a 64-bit seed.

    The sign diagonal and the projection use separate derived streams,
    so either part can be resampled independently in experiments without
    disturbing the other.
    """
    seed = check_seed(seed)
    diag = sample_sign_diagonal(params.d, derive_rng(seed, 0))
    proj = sample_sparse_projection(params, derive_rng(seed, 1))
    return FjltTransform(diagonal=diag, projection=proj, params=params, seed=seed)


def sample_gaussian(params: EmbedParams, seed: int) -> GaussianTransform:
    seed = check_seed(seed)
    rng = derive_rng(seed, 2)
    mat = standard_normals(rng, (params.k, params.d)) / np.sqrt(params.k)
    return GaussianTransform(matrix=mat, seed=seed)


def apply(transform: FjltTransform, x: np.ndarray) -> np.ndarray:
    """Embed one point: the literal product P @ fwht(D * x)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != transform.d:
        raise DimensionMismatch(
            f"point has shape {x.shape}, transform expects ({transform.d},)"
        )
    u = fwht_inplace(transform.diagonal.signs * x)
    return transform.projection.matvec(u)


def apply_batch(transform: FjltTransform, dataset: DataSet, normalized: bool = False) -> DataSet:
    """Embed every point of a dataset (rows in order, labels carried).

    With ``normalized=True`` the output is multiplied by ``scale`` so
    squared norms are preserved in expectation, which is the form the
    neighbor-preservation checks and the CLI consume.
    """
    if dataset.d != transform.d:
        raise DimensionMismatch(
            f"dataset width {dataset.d} does not match transform width {transform.d}"
        )
    u = fwht_inplace(dataset.points * transform.diagonal.signs)
    emb = (transform.projection.to_csr() @ u.T).T
    if normalized:
        emb = emb * transform.scale
    return DataSet(points=np.ascontiguousarray(emb), d_orig=transform.k, labels=dataset.labels)


def apply_gaussian(transform: GaussianTransform, x: np.ndarray) -> np.ndarray:
    return transform.apply(x)


def transform_to_dict(transform: FjltTransform) -> dict:
    """JSON-ready dict carrying exact values (floats round-trip via repr)."""
    return {
        "format": SERIAL_FORMAT,
        "version": SERIAL_VERSION,
        "kind": "fjlt",
        "seed": transform.seed,
        "params": transform.params.to_dict(),
        "signs": [int(v) for v in transform.diagonal.signs],
        "indptr": [int(v) for v in transform.projection.indptr],
        "indices": [int(v) for v in transform.projection.indices],
        "data": [float(v) for v in transform.projection.data],
    }


def transform_from_dict(doc: dict) -> FjltTransform:
    if doc.get("format") != SERIAL_FORMAT:
        raise DomainError(f"not a serialized transform: format={doc.get('format')!r}")
    if doc.get("version") != SERIAL_VERSION:
        raise DomainError(f"unsupported transform version {doc.get('version')!r}")
    if doc.get("kind") != "fjlt":
        raise DomainError(f"unsupported transform kind {doc.get('kind')!r}")
    params = EmbedParams(**doc["params"])
    diag = SignDiagonal(signs=np.asarray(doc["signs"], dtype=np.float64))
    proj = SparseProjection(
        k=params.k,
        d=params.d,
        q=params.q,
        indptr=np.asarray(doc["indptr"], dtype=np.int64),
        indices=np.asarray(doc["indices"], dtype=np.int64),
        data=np.asarray(doc["data"], dtype=np.float64),
    )
    return FjltTransform(diagonal=diag, projection=proj, params=params, seed=doc["seed"])
