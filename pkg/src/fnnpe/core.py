"""Domain types, parameter selection, and the seeded-randomness contract.

A :class:`DataSet` is an (n, d) float64 array of points.  Datasets built
through :func:`make_dataset` are zero-padded on the right so that d is a
power of two, which the fast transform requires; padding leaves every
pairwise distance unchanged.  Datasets produced by embedding carry
whatever width the projection had, so the power-of-two property is a
construction guarantee, not a type invariant.

All randomness in the package flows through numpy Generators derived via
:func:`derive_rng` from a 64-bit master seed plus an integer key path.
Trial i of a Monte-Carlo run uses the stream (seed, trial_index), so
results do not depend on execution order or thread count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import (
    DomainError,
    EmptyInput,
    NoReductionWarning,
    NonFinite,
    NonPowerOfTwo,
    RaggedInput,
)

_SEED_MAX = 2**64 - 1

# Constant from the smoothness calibration: the per-dataset failure
# probability of the sign-diagonal conditioning step is exp(-c/2.2),
# which for c = 7 is below 1/20.
DEFAULT_C_SMOOTH = 7.0
DEFAULT_C_SPARSITY = 1.0
DEFAULT_C_DIM = 1.0


def is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def next_power_of_two(m: int) -> int:
    if m < 1:
        raise DomainError(f"dimension must be positive, got {m}")
    return 1 << (m - 1).bit_length()


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) <= _SEED_MAX:
        raise DomainError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return int(seed)


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for stream ``key`` under a master seed.

    ``derive_rng(seed, 3)`` and ``derive_rng(seed, 4)`` are statistically
    independent streams; calling with the same arguments always yields
    the same stream, regardless of what other streams were consumed.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((check_seed(seed),) + tuple(key))))


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals via inverse-CDF over mid-point uniforms.

    Using bin mid-points keeps the uniforms strictly inside (0, 1), so
    ndtri never sees 0 or 1, and the draw is a pure function of the
    generator's integer stream.
    """
    u = (rng.integers(0, 1 << 53, size=size, dtype=np.uint64).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


@dataclass(frozen=True, eq=False)
class DataSet:
    """A finite point set in R^d.

    Attributes
    ----------
    points : ndarray of shape (n, d)
        Row-major float64 points.
    d_orig : int
        Width of the rows before any zero padding.
    labels : tuple or None
        Optional opaque per-point identifiers, carried through embedding.
    """

    points: np.ndarray
    d_orig: int
    labels: tuple | None = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __post_init__(self):
        pts = self.points
        if pts.ndim != 2:
            raise RaggedInput(f"points must be a 2-d array, got ndim={pts.ndim}")
        if pts.shape[0] < 2:
            raise EmptyInput(f"a dataset needs at least two points, got {pts.shape[0]}")
        if not np.isfinite(pts).all():
            raise NonFinite("points contain NaN or infinite entries")
        if self.labels is not None and len(self.labels) != pts.shape[0]:
            raise RaggedInput(
                f"got {len(self.labels)} labels for {pts.shape[0]} points"
            )


def make_dataset(raw_points, labels=None) -> DataSet:
    """Validate raw rows and zero-pad them to a power-of-two width.

    Parameters
    ----------
    raw_points : array-like of shape (n, d_orig)
        Anything numpy can coerce to a 2-d float array.  Ragged input,
        fewer than two rows, and non-finite entries are rejected.
    labels : sequence, optional
        Per-point identifiers, kept as an opaque tuple.

    Returns
    -------
    DataSet
        Points widened to ``next_power_of_two(d_orig)`` columns.  The
        padding is zeros, so all pairwise distances are exactly those of
        the input.
    """
    if isinstance(raw_points, np.ndarray) and raw_points.dtype == object:
        raise RaggedInput("rows have differing lengths")
    try:
        pts = np.asarray(raw_points, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise RaggedInput(f"could not coerce points to a float matrix: {exc}") from exc
    if pts.ndim != 2:
        raise RaggedInput(f"expected rows of equal length, got array of ndim={pts.ndim}")
    if pts.shape[0] < 2:
        raise EmptyInput(f"a dataset needs at least two points, got {pts.shape[0]}")
    if pts.shape[1] < 1:
        raise EmptyInput("points must have at least one coordinate")
    if not np.isfinite(pts).all():
        raise NonFinite("points contain NaN or infinite entries")
    d_orig = pts.shape[1]
    d_pad = next_power_of_two(d_orig)
    if d_pad != d_orig:
        padded = np.zeros((pts.shape[0], d_pad), dtype=np.float64)
        padded[:, :d_orig] = pts
        pts = padded
    else:
        pts = pts.copy()
    return DataSet(points=pts, d_orig=d_orig, labels=tuple(labels) if labels is not None else None)


@dataclass(frozen=True)
class EmbedParams:
    """Frozen record of every number an embedding run depends on.

    ``s`` bounds the max-coordinate of transformed unit differences,
    ``q`` is the expected fraction of nonzero projection entries, and
    ``k`` is the target dimension.  Instances are produced by
    :func:`select_params`; experiment code may rebuild variants with
    ``dataclasses.replace`` when sweeping a single knob.
    """

    n: int
    d: int
    epsilon: float
    delta: float
    lam: float
    s: float
    q: float
    k: int
    c_smooth: float = DEFAULT_C_SMOOTH
    c_sparsity: float = DEFAULT_C_SPARSITY
    c_dim: float = DEFAULT_C_DIM

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "lam": self.lam,
            "s": self.s,
            "q": self.q,
            "k": self.k,
            "c_smooth": self.c_smooth,
            "c_sparsity": self.c_sparsity,
            "c_dim": self.c_dim,
        }


def select_params(
    n: int,
    d: int,
    epsilon: float,
    delta: float,
    lam: float,
    c_smooth: float = DEFAULT_C_SMOOTH,
    c_sparsity: float = DEFAULT_C_SPARSITY,
    c_dim: float = DEFAULT_C_DIM,
) -> EmbedParams:
    """Derive (s, q, k) from the problem size and accuracy targets.

    Parameters
    ----------
    n : int
        Number of points (at least 2).
    d : int
        Ambient dimension; must be a power of two (pad first).
    epsilon : float in (0, 1)
        Relative distance error the embedding may introduce.
    delta : float in (0, 1/2)
        Failure probability budget, split evenly between the distortion
        and shrinkage sides of the argument.
    lam : float >= 1
        Doubling constant of the point set (measured or assumed).
    c_smooth, c_sparsity, c_dim : float
        Calibrated leading constants.  Defaults were fixed by the
        calibration run shipped with the test suite.

    Returns
    -------
    EmbedParams
        With ``s = min(1, sqrt(c_smooth ln(n^2 d) / d))``,
        ``q = min(c_sparsity s^2, 1)`` and
        ``k = ceil(c_dim ln(2/eps)/eps^2 ln(1/delta) max(1, log2 lam))``.

    Notes
    -----
    Logarithms in the ``k`` formula are natural except the doubling
    term, which is binary and floored at 1 so degenerate point sets
    (lam < 2) still get a positive dimension.  A warning is issued when
    k >= d, where the projection no longer reduces dimension.
    """
    if n < 2:
        raise EmptyInput(f"need at least two points, got n={n}")
    if not is_power_of_two(d):
        raise NonPowerOfTwo(f"d must be a power of two, got {d}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    if lam < 1.0 or not math.isfinite(lam):
        raise DomainError(f"doubling constant must be >= 1, got {lam}")
    for name, val in (("c_smooth", c_smooth), ("c_sparsity", c_sparsity), ("c_dim", c_dim)):
        if val <= 0 or not math.isfinite(val):
            raise DomainError(f"{name} must be positive, got {val}")
    if n * n * d < 3.7:
        # below this, s would fall under the 3/sqrt(d) floor that the
        # moment-based smoothness bound needs
        raise DomainError(f"n^2*d must be at least 3.7, got {n * n * d}")

    s = math.sqrt(c_smooth * math.log(n * n * d) / d)
    s = min(s, 1.0)
    q = min(c_sparsity * s * s, 1.0)
    k_real = c_dim * (math.log(2.0 / epsilon) / epsilon**2) * math.log(1.0 / delta) * max(1.0, math.log2(lam))
    k = max(1, math.ceil(k_real))
    if k >= d:
        warnings.warn(
            f"target dimension k={k} is not below d={d}; the embedding will not reduce dimension",
            NoReductionWarning,
            stacklevel=2,
        )
    return EmbedParams(
        n=n,
        d=d,
        epsilon=float(epsilon),
        delta=float(delta),
        lam=float(lam),
        s=s,
        q=q,
        k=k,
        c_smooth=float(c_smooth),
        c_sparsity=float(c_sparsity),
        c_dim=float(c_dim),
    )
