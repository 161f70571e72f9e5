"""Exact nearest neighbors and doubling-constant estimation.

The doubling constant of a point set X is the smallest number of
half-radius balls, centered at points of X, that always suffice to
cover any ball B(x, r) intersected with X.  ``doubling_constant_exact``
solves every cover instance optimally and is capped at 16 points;
``doubling_constant_greedy`` scales to real datasets by sampling centers
and radii and covering greedily, which can only overshoot the optimal
cover size, so the estimate is an upper bound per probed instance.

Balls are closed, and every distance comparison uses a relative slack
of 1e-9 so that boundary pairs (a point exactly on a ball's surface)
do not flip membership under benign float noise such as a rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

from .core import DataSet
from .errors import TooLarge

#: relative slack for "dist <= radius" tests
REL_TOL = 1e-9

#: instance-size cap for the exact set-cover search
EXACT_MAX_POINTS = 16


@dataclass(frozen=True, eq=False)
class NnTable:
    """Per-point nearest neighbor: index and distance, ties to the
    smallest index."""

    nn_index: np.ndarray
    nn_distance: np.ndarray


@dataclass(frozen=True)
class DoublingEstimate:
    """Result of a doubling-constant computation.

    ``witness`` is the (center index, radius, cover size) triple that
    attained the maximum.  ``is_exact`` distinguishes the exhaustive
    search from the greedy upper bound.
    """

    value: int
    method: str
    witness: tuple[int, float, int]
    radii_probed: tuple[float, ...]
    is_exact: bool


def brute_force_nn(dataset: DataSet) -> NnTable:
    """Exact nearest neighbor of every point by full pairwise scan."""
    dist = cdist(dataset.points, dataset.points)
    np.fill_diagonal(dist, np.inf)
    idx = np.argmin(dist, axis=1)  # argmin takes the first minimum: smallest index wins ties
    return NnTable(nn_index=idx, nn_distance=dist[np.arange(dataset.n), idx])


def _cover_sets(universe: np.ndarray, half_masks: np.ndarray) -> list[int]:
    """Candidate cover sets as bitmasks over the universe's members."""
    members = np.flatnonzero(universe)
    bits = {}
    for z in range(half_masks.shape[0]):
        mask = 0
        covered = half_masks[z][members]
        for pos, hit in enumerate(covered):
            if hit:
                mask |= 1 << pos
        if mask:
            bits[mask] = None  # dedupe identical sets
    # drop dominated sets (subsets of another candidate)
    masks = sorted(bits, key=lambda m: -bin(m).count("1"))
    kept: list[int] = []
    for m in masks:
        if not any(m | other == other for other in kept):
            kept.append(m)
    return kept


def _min_cover(n_members: int, masks: list[int]) -> int:
    """Smallest number of masks whose union covers all members."""
    full = (1 << n_members) - 1
    if not masks:
        return 0 if full == 0 else n_members
    # greedy upper bound first, then exhaustively test smaller sizes
    covered, greedy = 0, 0
    pool = list(masks)
    while covered != full:
        best = max(pool, key=lambda m: bin(m & ~covered).count("1"))
        covered |= best
        greedy += 1
    for size in range(1, greedy):
        for combo in combinations(masks, size):
            acc = 0
            for m in combo:
                acc |= m
            if acc == full:
                return size
    return greedy


def doubling_constant_exact(dataset: DataSet) -> DoublingEstimate:
    """Exhaustive doubling constant for tiny point sets (n <= 16).

    Probes every center and every pairwise distance as a radius; the
    covered set only changes at those radii, and shrinking the radius
    within one membership class only makes covering harder, so the
    first (smallest) radius producing each membership class decides it.
    Each cover instance is solved to optimality.
    """
    n = dataset.n
    if n > EXACT_MAX_POINTS:
        raise TooLarge(
            f"exact search is capped at {EXACT_MAX_POINTS} points, got {n}; use the greedy estimate"
        )
    dist = cdist(dataset.points, dataset.points)
    radii = np.unique(dist[dist > 0])  # ascending, so the first radius
    # producing a membership class is the smallest (hardest) one
    best = 1
    witness = (0, 0.0, 1)
    seen_universes = set()
    for r in radii:
        half_masks = dist <= (r / 2.0) * (1.0 + REL_TOL)
        ball = dist <= r * (1.0 + REL_TOL)
        for c in range(n):
            universe = ball[c]
            key = (c, universe.tobytes())
            if key in seen_universes:
                continue
            seen_universes.add(key)
            size = int(universe.sum())
            if size <= best:
                continue
            cover = _min_cover(size, _cover_sets(universe, half_masks))
            if cover > best:
                best = cover
                witness = (c, float(r), cover)
    return DoublingEstimate(
        value=best,
        method="exact",
        witness=witness,
        radii_probed=tuple(float(r) for r in radii),
        is_exact=True,
    )


def doubling_constant_greedy(
    dataset: DataSet,
    radii_per_scale: int = 32,
    sample_centers: int = 64,
    seed: int = 0,
) -> DoublingEstimate:
    """Greedy upper-bound estimate of the doubling constant.

    Probes ``sample_centers`` centers (all of them when n is small) at
    ``radii_per_scale`` geometrically spaced radii between the smallest
    and largest pairwise distance, plus every exact pairwise radius when
    n is within the exact solver's cap, so on those instances this
    estimate dominates the exact value.  Each cover instance is solved
    with the classic greedy rule (pick the ball covering the most
    uncovered points), which never beats the optimal cover, hence the
    estimate is an upper bound on each probed instance's optimum.
    """
    n = dataset.n
    dist = cdist(dataset.points, dataset.points)
    positive = dist[dist > 0]
    if positive.size == 0:
        return DoublingEstimate(
            value=1, method="greedy", witness=(0, 0.0, 1), radii_probed=(), is_exact=False
        )
    lo, hi = float(positive.min()), float(positive.max())
    radii = np.geomspace(lo, hi, num=max(2, radii_per_scale))
    if n <= EXACT_MAX_POINTS:
        radii = np.union1d(radii, np.unique(positive))
    if n <= sample_centers:
        centers = np.arange(n)
    else:
        rng = np.random.default_rng(seed)
        centers = np.sort(rng.choice(n, size=sample_centers, replace=False))

    best = 1
    witness = (int(centers[0]), float(radii[0]), 1)
    for r in radii:
        half = dist <= (r / 2.0) * (1.0 + REL_TOL)
        ball = dist <= r * (1.0 + REL_TOL)
        for c in centers:
            universe = ball[c]
            size = int(universe.sum())
            if size <= best:
                continue
            picked = _greedy_cover(universe, half)
            if picked > best:
                best = picked
                witness = (int(c), float(r), picked)
    return DoublingEstimate(
        value=best,
        method="greedy",
        witness=witness,
        radii_probed=tuple(float(r) for r in radii),
        is_exact=False,
    )


def _greedy_cover(universe: np.ndarray, half: np.ndarray) -> int:
    """Greedy set cover count; ties broken toward the smallest index."""
    uncovered = universe.copy()
    # only centers that reach at least one universe point are useful
    useful = np.flatnonzero(half[:, universe].any(axis=1))
    picked = 0
    while uncovered.any():
        gains = half[useful][:, uncovered].sum(axis=1)
        z = useful[np.argmax(gains)]
        uncovered &= ~half[z]
        picked += 1
    return picked
