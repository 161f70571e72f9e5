"""Monte-Carlo verification of the embedding's probabilistic claims.

Each ``mc_*`` operation is deterministic given (seed, trials): work is
split into fixed-size chunks and chunk i draws from the generator
stream (seed, i), so estimates do not depend on execution order or on
``FNNPE_THREADS``.  Estimates compare an empirical frequency against an
analytic tail bound with a three-standard-error slack; reports carry
enough detail (witness pairs, per-row values, fitted exponents) to be
audited without re-running.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .bounds import TailBound, shrinkage_bound
from .core import DataSet, EmbedParams, derive_rng, standard_normals
from .errors import DomainError, SizeMismatch, TooLarge, ZeroVector
from .fjlt import SignDiagonal, SparseProjection, sample_sign_diagonal, sample_sparse_projection
from .fwht import fwht_inplace
from .metrics import brute_force_nn

#: exhaustive smoothness checks are capped at this many points
SMOOTHNESS_MAX_POINTS = 2000

#: trials per independent generator stream in chunked estimators
CHUNK_TRIALS = 512


def max_threads() -> int:
    """Worker cap for trial parallelism, from FNNPE_THREADS (default 1)."""
    raw = os.environ.get("FNNPE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_chunks(fn: Callable, chunks: Sequence, threads: int | None = None) -> list:
    """Run ``fn`` over chunks, optionally on a thread pool.

    Chunk results are reduced by the caller with order-insensitive
    operations, so the thread count never changes the outcome.
    """
    threads = max_threads() if threads is None else max(1, threads)
    if threads == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _chunk_sizes(trials: int, chunk: int = CHUNK_TRIALS) -> list[int]:
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


@dataclass(frozen=True, eq=False)
class McEstimate:
    """A Bernoulli frequency estimate with its comparison bound."""

    trials: int
    successes: int
    analytic_bound: TailBound | None = None
    details: dict | None = None

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def std_err(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    def within_bound(self, slack_sigmas: float = 3.0) -> bool:
        if self.analytic_bound is None:
            raise DomainError("estimate carries no analytic bound to compare against")
        return self.p_hat <= self.analytic_bound.value + slack_sigmas * self.std_err


@dataclass(frozen=True, eq=False)
class SmoothnessReport:
    """Outcome of bounding max|HD(x - y)| / ||x - y|| over probed pairs."""

    s: float
    max_ratio: float
    is_smooth: bool
    pairs_probed: int
    exhaustive: bool
    worst_pair: tuple[int, int]  # indices into the point list; n means the origin


@dataclass(frozen=True, eq=False)
class ZiReport:
    """Per-row captured mass of a projection pattern on a unit vector."""

    z_values: np.ndarray
    q: float
    all_above_half_q: bool


@dataclass(frozen=True, eq=False)
class TwoStabilityReport:
    """Checks that a +-weighted Gaussian sum matches its scaled law."""

    trials: int
    sample_mean: float
    sample_variance: float
    expected_variance: float
    variance_std_err: float
    ks_gap: float
    ks_threshold: float

    @property
    def mean_ok(self) -> bool:
        # the mean of T draws of N(0, var) has std sqrt(var/T)
        return abs(self.sample_mean) <= 5.0 * math.sqrt(self.expected_variance / self.trials)

    @property
    def variance_ok(self) -> bool:
        return abs(self.sample_variance - self.expected_variance) <= 5.0 * self.variance_std_err

    @property
    def ks_ok(self) -> bool:
        return self.ks_gap <= self.ks_threshold

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.variance_ok and self.ks_ok


@dataclass(frozen=True, eq=False)
class NnPreservationReport:
    """Definition-level audit of neighbor preservation for a point set.

    Property 1: the embedded distance from each point to some other
    point stays within (1 + eps) of its original nearest-neighbor
    distance.  Property 2: no point that was farther than (1 + 2 eps)
    times the nearest-neighbor distance lands within (1 + eps) of it.
    ``p2_witnesses`` lists one violating pair per failing point as
    (point, offender, original distance, embedded distance).
    """

    epsilon: float
    n: int
    p1_flags: np.ndarray
    p2_flags: np.ndarray
    p2_witnesses: tuple[tuple[int, int, float, float], ...]

    @property
    def joint_flags(self) -> np.ndarray:
        return self.p1_flags & self.p2_flags

    @property
    def p1_rate(self) -> float:
        return float(self.p1_flags.mean())

    @property
    def p2_rate(self) -> float:
        return float(self.p2_flags.mean())

    @property
    def joint_rate(self) -> float:
        return float(self.joint_flags.mean())


def _with_origin(dataset: DataSet) -> np.ndarray:
    """Points plus the origin row; differences to it are the points themselves."""
    return np.vstack([dataset.points, np.zeros((1, dataset.d))])


def check_smoothness(
    diagonal: SignDiagonal,
    dataset: DataSet,
    s: float,
    mode: str = "exhaustive",
    pairs: int | None = None,
    seed: int = 0,
) -> SmoothnessReport:
    """Measure the worst max-coordinate blow-up of transformed differences.

    Probes pairs (x, y) drawn from the points plus the origin, applies
    one fast transform to each sign-flipped difference, and compares the
    max coordinate against s times the pair's Euclidean distance.
    ``mode="exhaustive"`` checks every pair (capped at
    ``SMOOTHNESS_MAX_POINTS`` points); ``mode="sampled"`` checks
    ``pairs`` random ones.
    """
    if s <= 0 or not math.isfinite(s):
        raise DomainError(f"s must be positive, got {s}")
    pts = _with_origin(dataset)
    m = pts.shape[0]
    if mode == "exhaustive":
        if dataset.n > SMOOTHNESS_MAX_POINTS:
            raise TooLarge(
                f"exhaustive smoothness check capped at {SMOOTHNESS_MAX_POINTS} points, got {dataset.n}"
            )
        ii, jj = np.triu_indices(m, k=1)
    elif mode == "sampled":
        if pairs is None or pairs < 1:
            raise DomainError("sampled mode needs a positive number of pairs")
        rng = derive_rng(seed, 0)
        ii = rng.integers(0, m, size=pairs)
        jj = rng.integers(0, m, size=pairs)
        keep = ii != jj
        ii, jj = ii[keep], jj[keep]
    else:
        raise DomainError(f"unknown mode {mode!r}")

    signs = diagonal.signs
    max_ratio = 0.0
    worst = (0, 0)
    probed = 0
    step = max(1, (1 << 22) // max(1, dataset.d))  # ~4M floats per slab
    for lo in range(0, ii.shape[0], step):
        a, b = ii[lo : lo + step], jj[lo : lo + step]
        diff = pts[a] - pts[b]
        norms = np.linalg.norm(diff, axis=1)
        keep = norms > 0.0
        if not keep.any():
            continue
        diff, norms, a, b = diff[keep], norms[keep], a[keep], b[keep]
        transformed = fwht_inplace(diff * signs)
        ratios = np.abs(transformed).max(axis=1) / norms
        probed += ratios.shape[0]
        top = int(np.argmax(ratios))
        if ratios[top] > max_ratio:
            max_ratio = float(ratios[top])
            worst = (int(a[top]), int(b[top]))
    return SmoothnessReport(
        s=s,
        max_ratio=max_ratio,
        is_smooth=max_ratio <= s,
        pairs_probed=probed,
        exhaustive=(mode == "exhaustive"),
        worst_pair=worst,
    )


def sample_smooth_diagonal(
    dataset: DataSet, s: float, seed: int, max_tries: int = 200
) -> tuple[SignDiagonal, int]:
    """Resample sign diagonals until the dataset is s-smooth under one.

    Returns the diagonal and the number of attempts.  The per-attempt
    failure probability is bounded by exp(-c/2.2) when s comes from
    ``select_params``, so more than a handful of tries signals a bug.
    """
    for attempt in range(1, max_tries + 1):
        diag = sample_sign_diagonal(dataset.d, derive_rng(seed, attempt))
        report = check_smoothness(diag, dataset, s)
        if report.is_smooth:
            return diag, attempt
    raise DomainError(
        f"no smooth sign diagonal found in {max_tries} tries; s={s} is likely below "
        "what this dataset supports"
    )


def smooth_unit_vector(
    d: int, s: float, rng: np.random.Generator, max_tries: int = 1000
) -> np.ndarray:
    """Uniform unit vector conditioned on max-coordinate at most s."""
    if s < 1.0 / math.sqrt(d):
        raise DomainError(
            f"no unit vector in dimension {d} has max coordinate below {s}; need s >= d**-0.5"
        )
    for _ in range(max_tries):
        v = standard_normals(rng, d)
        v /= np.linalg.norm(v)
        if np.abs(v).max() <= s:
            return v
    raise DomainError(f"could not sample a unit vector with max coordinate <= {s} in {max_tries} tries")


def zi_report(projection: SparseProjection, u: np.ndarray) -> ZiReport:
    """Captured squared mass of ``u`` per projection row.

    Row i of the projection sees the coordinates in its support; the
    captured mass z_i = sum of u_j^2 over that support has mean q for a
    unit vector, and the shrinkage argument needs every z_i >= q/2.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (projection.d,):
        raise DomainError(f"expected a vector of length {projection.d}, got shape {u.shape}")
    u2 = u * u
    z = np.array([u2[projection.row(i)[0]].sum() for i in range(projection.k)])
    return ZiReport(z_values=z, q=projection.q, all_above_half_q=bool((z >= projection.q / 2.0).all()))


def _sparse_patterns_z(
    u2: np.ndarray, k: int, q: float, n_trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Captured-mass matrix (n_trials, k) for fresh Bernoulli(q) rows.

    Patterns are drawn by geometric gap skipping over the flattened
    (trials * k * d) cell range, which costs O(number of nonzeros)
    instead of O(cells)."""
    d = u2.shape[0]
    total = n_trials * k * d
    if q >= 1.0:
        return np.full((n_trials, k), u2.sum())
    positions = []
    last = -1
    chunk = int(total * q + 10.0 * math.sqrt(total * q) + 16)
    while last < total:
        gaps = rng.geometric(q, size=chunk)
        cum = last + np.cumsum(gaps)
        positions.append(cum)
        last = int(cum[-1])
    flat = np.concatenate(positions) if len(positions) > 1 else positions[0]
    flat = flat[flat < total]
    row_ids = flat // d  # global row index across all trials
    cols = flat % d
    z = np.bincount(row_ids, weights=u2[cols], minlength=n_trials * k)
    return z.reshape(n_trials, k)


def mc_zi_concentration(
    q: float, d: int, k: int, s: float, trials: int, seed: int = 0
) -> McEstimate:
    """Frequency of any projection row capturing less than q/2 mass.

    Each trial draws a fresh smooth unit vector and k fresh Bernoulli(q)
    support patterns; failure means some row's captured mass falls below
    q/2.  Compared against the 1/20 budget that the shrinkage argument
    allots to this event.
    """
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    if trials < 1:
        raise DomainError("need at least one trial")
    sizes = _chunk_sizes(trials)

    def run_chunk(args):
        idx, size = args
        rng = derive_rng(seed, idx)
        failures = 0
        for t in range(size):
            u = smooth_unit_vector(d, s, rng)
            z = _sparse_patterns_z(u * u, k, q, 1, rng)
            if (z < q / 2.0).any():
                failures += 1
        return failures

    failures = sum(_map_chunks(run_chunk, list(enumerate(sizes))))
    bound = TailBound(
        value=1.0 / 20.0,
        formula_id="zi_half_mass_budget",
        inputs={"q": q, "d": d, "k": k, "s": s},
        raw=1.0 / 20.0,
    )
    return McEstimate(trials=trials, successes=failures, analytic_bound=bound)


def mc_shrinkage(params: EmbedParams, trials: int, seed: int = 0) -> McEstimate:
    """Frequency of the raw embedded norm collapsing below eps.

    A unit vector is fixed, a sign diagonal is resampled until the
    vector is smooth, and then only the sparse projection is redrawn
    each trial; the event is ||P H D x|| <= eps, compared against
    (3 eps)^k.  Trials are drawn in fixed-size chunks, each chunk being
    a run of independent projections laid out back to back.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    eps, k, d, q, s = params.epsilon, params.k, params.d, params.q, params.s
    x = standard_normals(derive_rng(seed, 0), d)
    x /= np.linalg.norm(x)
    probe = DataSet(points=np.vstack([x, np.zeros(d)]), d_orig=d)
    diag, _ = sample_smooth_diagonal(probe, s, seed=seed)
    u = fwht_inplace(diag.signs * x)
    u2 = u * u

    # keep each chunk's flattened cell range moderate
    chunk = max(1, min(CHUNK_TRIALS, (1 << 22) // max(1, k * d)))
    sizes = [min(chunk, trials - i) for i in range(0, trials, chunk)]

    def run_chunk(args):
        idx, size = args
        rng = derive_rng(seed, 2, idx)
        total = size * k * d
        if q >= 1.0:
            flat = np.arange(total, dtype=np.int64)
        else:
            positions, last = [], -1
            draw = int(total * q + 10.0 * math.sqrt(total * q) + 16)
            while last < total:
                gaps = rng.geometric(q, size=draw)
                cum = last + np.cumsum(gaps)
                positions.append(cum)
                last = int(cum[-1])
            flat = np.concatenate(positions) if len(positions) > 1 else positions[0]
            flat = flat[flat < total]
        rows = flat // d
        cols = flat % d
        vals = standard_normals(rng, flat.shape[0]) / math.sqrt(q)
        y = np.bincount(rows, weights=vals * u[cols], minlength=size * k).reshape(size, k)
        return int(((y * y).sum(axis=1) <= eps * eps).sum())

    hits = sum(_map_chunks(run_chunk, list(enumerate(sizes))))
    return McEstimate(trials=trials, successes=hits, analytic_bound=shrinkage_bound(eps, k))


def mc_distortion(
    params: EmbedParams,
    dataset: DataSet,
    trials: int,
    seed: int = 0,
    k_override: int | None = None,
) -> McEstimate:
    """Frequency of pairwise distances escaping the (1 +- eps) band.

    A sign diagonal is fixed after conditioning on dataset smoothness;
    each trial redraws the sparse projection and measures the fraction
    of difference vectors (points plus the origin) whose embedded length
    falls outside (1 +- eps) of the original, after the k**-0.5
    normalization that makes the embedding an expected isometry.

    Returns the pooled per-pair estimate; details carry the worst pair's
    frequency and the fitted exponent log(p_hat) / (k eps^2).
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    if dataset.d != params.d:
        raise DomainError(f"dataset width {dataset.d} does not match params d={params.d}")
    run_params = params if k_override is None else replace(params, k=k_override)
    eps, k = run_params.epsilon, run_params.k

    diag, _ = sample_smooth_diagonal(dataset, run_params.s, seed=seed)
    pts = _with_origin(dataset)
    transformed = fwht_inplace(pts * diag.signs)
    ii, jj = np.triu_indices(pts.shape[0], k=1)
    orig = np.linalg.norm(pts[ii] - pts[jj], axis=1)
    keep = orig > 0.0
    ii, jj, orig = ii[keep], jj[keep], orig[keep]
    lo, hi = (1.0 - eps) * orig, (1.0 + eps) * orig

    scale = 1.0 / math.sqrt(k)
    pair_failures = np.zeros(orig.shape[0], dtype=np.int64)

    def run_chunk(args):
        idx, size = args
        rng = derive_rng(seed, 1, idx)
        counts = np.zeros(orig.shape[0], dtype=np.int64)
        for _ in range(size):
            proj = sample_sparse_projection(run_params, rng)
            emb = (proj.to_csr() @ transformed.T).T * scale
            dist = np.linalg.norm(emb[ii] - emb[jj], axis=1)
            counts += (dist < lo) | (dist > hi)
        return counts

    sizes = _chunk_sizes(trials, chunk=64)
    for counts in _map_chunks(run_chunk, list(enumerate(sizes))):
        pair_failures += counts

    total = int(pair_failures.sum())
    n_pairs = orig.shape[0]
    p_hat = total / (trials * n_pairs)
    bound = TailBound(
        value=run_params.delta,
        formula_id="distortion_delta_budget",
        inputs={"epsilon": eps, "k": k, "delta": run_params.delta},
        raw=run_params.delta,
    )
    fitted = math.log(p_hat) / (k * eps * eps) if p_hat > 0 else -math.inf
    return McEstimate(
        trials=trials * n_pairs,
        successes=total,
        analytic_bound=bound,
        details={
            "k": k,
            "pairs": n_pairs,
            "resamplings": trials,
            "worst_pair_freq": float(pair_failures.max()) / trials,
            "fitted_exponent": fitted,
        },
    )


def verify_nn_preservation(original: DataSet, embedded: DataSet, epsilon: float) -> NnPreservationReport:
    """Audit both neighbor-preservation properties point by point.

    Comparisons are exact (no tolerance): property 1 wants some embedded
    distance at most (1 + eps) times the original nearest-neighbor
    distance, property 2 wants every originally-far point (beyond
    (1 + 2 eps) times it) to stay strictly farther than (1 + eps) times
    it in the embedding.
    """
    if original.n != embedded.n:
        raise SizeMismatch(f"datasets have different sizes: {original.n} vs {embedded.n}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    nn = brute_force_nn(original)
    d_orig = cdist(original.points, original.points)
    d_emb = cdist(embedded.points, embedded.points)
    n = original.n
    eye = np.arange(n)

    d_emb_off = d_emb.copy()
    d_emb_off[eye, eye] = np.inf
    near_budget = (1.0 + epsilon) * nn.nn_distance
    p1 = d_emb_off.min(axis=1) <= near_budget

    far = d_orig > (1.0 + 2.0 * epsilon) * nn.nn_distance[:, None]
    violating = far & (d_emb <= near_budget[:, None])
    p2 = ~violating.any(axis=1)

    witnesses = []
    for x in np.flatnonzero(~p2):
        y = int(np.argmax(violating[x]))
        witnesses.append((int(x), y, float(d_orig[x, y]), float(d_emb[x, y])))
    return NnPreservationReport(
        epsilon=epsilon,
        n=n,
        p1_flags=p1,
        p2_flags=p2,
        p2_witnesses=tuple(witnesses),
    )


def mc_gaussian_dominance(
    x_vars: Iterable[float], y_vars: Iterable[float], t: float, trials: int, seed: int = 0
) -> tuple[McEstimate, McEstimate]:
    """Empirical check that wider Gaussians make small sums rarer.

    With per-coordinate variances y_i >= x_i, the probability that the
    squared sum stays below t can only drop.  Returns the two estimates;
    the caller compares p_hat_Y <= p_hat_X plus combined noise.
    """
    x_vars = np.asarray(list(x_vars), dtype=np.float64)
    y_vars = np.asarray(list(y_vars), dtype=np.float64)
    if x_vars.shape != y_vars.shape or x_vars.ndim != 1 or x_vars.size == 0:
        raise DomainError("variance lists must be equal-length and nonempty")
    if (x_vars <= 0).any() or (y_vars <= 0).any():
        raise DomainError("variances must be positive")
    if (y_vars < x_vars).any():
        raise DomainError("dominance needs y_i >= x_i for every coordinate")
    if t <= 0:
        raise DomainError(f"threshold t must be positive, got {t}")
    if trials < 1:
        raise DomainError("need at least one trial")

    k = x_vars.size
    sx = np.sqrt(x_vars)
    sy = np.sqrt(y_vars)
    sizes = _chunk_sizes(trials, chunk=max(1, (1 << 22) // k))

    def run_chunk(args):
        idx, size = args
        rng = derive_rng(seed, idx)
        g = standard_normals(rng, (size, k))
        below_x = int((((g * sx) ** 2).sum(axis=1) <= t).sum())
        g = standard_normals(rng, (size, k))
        below_y = int((((g * sy) ** 2).sum(axis=1) <= t).sum())
        return below_x, below_y

    results = _map_chunks(run_chunk, list(enumerate(sizes)))
    hits_x = sum(r[0] for r in results)
    hits_y = sum(r[1] for r in results)
    return (
        McEstimate(trials=trials, successes=hits_x, details={"role": "narrow", "t": t}),
        McEstimate(trials=trials, successes=hits_y, details={"role": "wide", "t": t}),
    )


def dominance_holds(narrow: McEstimate, wide: McEstimate, slack_sigmas: float = 3.0) -> bool:
    """p_hat_wide <= p_hat_narrow within combined sampling noise."""
    combined = math.hypot(narrow.std_err, wide.std_err)
    return wide.p_hat <= narrow.p_hat + slack_sigmas * combined


def mc_two_stability(
    u: Iterable[float], sigma: float, trials: int, seed: int = 0
) -> TwoStabilityReport:
    """Check that sum(u_i X_i) behaves as ||u|| N(0, sigma^2).

    Compares sample mean and variance against the closed form, and the
    full empirical distribution against freshly drawn scaled normals via
    the two-sample max-CDF-gap statistic at significance 0.01.
    """
    u = np.asarray(list(u), dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise DomainError("weight vector must be 1-d and nonempty")
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ZeroVector("weights are all zero; the combined law is degenerate")
    if sigma <= 0 or not math.isfinite(sigma):
        raise DomainError(f"sigma must be positive, got {sigma}")
    if trials < 2:
        raise DomainError("need at least two trials")

    d = u.size
    sizes = _chunk_sizes(trials, chunk=max(1, (1 << 22) // d))

    def run_chunk(args):
        idx, size = args
        rng = derive_rng(seed, idx)
        combo = standard_normals(rng, (size, d)) @ u * sigma
        reference = standard_normals(rng, size) * (norm * sigma)
        return combo, reference

    parts = _map_chunks(run_chunk, list(enumerate(sizes)))
    combo = np.concatenate([p[0] for p in parts])
    reference = np.concatenate([p[1] for p in parts])

    expected_var = (sigma * norm) ** 2
    sample_var = float(combo.var(ddof=1))
    var_se = expected_var * math.sqrt(2.0 / (trials - 1))

    # two-sample max CDF gap, equal sample sizes
    a, b = np.sort(combo), np.sort(reference)
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / trials
    cdf_b = np.searchsorted(b, grid, side="right") / trials
    gap = float(np.abs(cdf_a - cdf_b).max())
    # threshold c(alpha) sqrt((n+m)/(nm)) with c(0.01) = sqrt(-ln(0.005)/2)
    threshold = math.sqrt(-math.log(0.005) / 2.0) * math.sqrt(2.0 / trials)

    return TwoStabilityReport(
        trials=trials,
        sample_mean=float(combo.mean()),
        sample_variance=sample_var,
        expected_variance=expected_var,
        variance_std_err=var_se,
        ks_gap=gap,
        ks_threshold=threshold,
    )
