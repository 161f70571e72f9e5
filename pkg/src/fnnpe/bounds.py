"""Closed-form tail bounds used by the verification suites.

Every function returns a :class:`TailBound`: the probability clamped to
[0, 1] plus the raw formula value, so callers can report how loose a
bound was even when it exceeds 1.  Formulas are evaluated in log space
where overflow is a risk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .errors import DomainError, PreconditionError

#: value of s^2*d at which the moment-based and Hoeffding-based
#: smoothness tails cross: d*exp(-x/2.2) <= 2d*exp(-x/2) exactly when
#: x <= 2*2.2/(2.2-2)*ln 2.  Below the crossover the moment bound is
#: tighter; above it the faster exp(-x/2) decay wins despite the
#: factor-2 handicap.
KHINTCHINE_CHERNOFF_CROSSOVER = 2.0 * 2.2 / (2.2 - 2.0) * math.log(2.0)


@dataclass(frozen=True)
class TailBound:
    """A probability bound with its provenance.

    ``value`` is clamped to [0, 1]; ``raw`` keeps the unclamped formula
    output.  ``formula_id`` names the producing function and ``inputs``
    echoes the arguments, so a report can be audited without re-running.
    """

    value: float
    formula_id: str
    inputs: dict
    raw: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"clamped bound escaped [0, 1]: {self.value}")


def _clamped(raw: float, formula_id: str, inputs: dict) -> TailBound:
    return TailBound(value=min(1.0, max(0.0, raw)), formula_id=formula_id, inputs=inputs, raw=raw)


def smoothness_tail_chernoff(s: float, d: int) -> TailBound:
    """Hoeffding bound 2d exp(-s^2 d / 2) for a sign-flipped unit vector.

    Each coordinate of the transformed vector is a +-1 combination with
    weights of square-norm 1/d, so it exceeds s with probability at most
    2 exp(-s^2 d / 2); a union over d coordinates gives the bound on the
    max coordinate exceeding s.
    """
    if d < 1:
        raise DomainError(f"d must be a positive integer, got {d}")
    if s < 0 or not math.isfinite(s):
        raise DomainError(f"s must be nonnegative, got {s}")
    raw = 2.0 * d * math.exp(-s * s * d / 2.0)
    return _clamped(raw, "smoothness_tail_chernoff", {"s": s, "d": d})


def khintchine_constant(p: float) -> float:
    """Optimal p-th moment constant of a +-1 combination.

    B_p = max(1, 2^((p-2)/2) Gamma((p+1)/2) / Gamma(3/2)), computed in
    log space.  For p >= 9 the closed form is dominated by
    (p/2.5)^(p/2), which the moment tail bound uses.
    """
    if p < 1 or not math.isfinite(p):
        raise DomainError(f"moment order must be >= 1, got {p}")
    log_b = (p - 2.0) / 2.0 * math.log(2.0) + gammaln((p + 1.0) / 2.0) - gammaln(1.5)
    if log_b <= 0.0:
        return 1.0
    value = math.exp(log_b) if log_b < 700 else math.inf
    if p >= 9:
        assert log_b <= (p / 2.0) * math.log(p / 2.5), "moment constant escaped its envelope"
    return value


def khintchine_constant_bound(p: float) -> float:
    """The envelope (p/2.5)^(p/2) that dominates B_p for p >= 9."""
    if p < 1 or not math.isfinite(p):
        raise DomainError(f"moment order must be >= 1, got {p}")
    log_v = (p / 2.0) * math.log(p / 2.5)
    return math.exp(log_v) if log_v < 700 else math.inf


def smoothness_tail_khintchine(s: float, d: int) -> TailBound:
    """Moment bound d exp(-s^2 d / 2.2), valid for s > 3/sqrt(d).

    Bounding the p-th moment of each transformed coordinate with
    B_p <= (p/2.5)^(p/2) and choosing p = s^2 d turns Markov's
    inequality into exp(-s^2 d ln(2.5)/2), which is at most
    exp(-s^2 d / 2.2); the union over d coordinates drops the factor 2
    that the Hoeffding route pays.  The choice p = s^2 d needs p >= 9,
    hence the domain floor on s.
    """
    if d < 1:
        raise DomainError(f"d must be a positive integer, got {d}")
    if not math.isfinite(s):
        raise DomainError(f"s must be finite, got {s}")
    if s <= 3.0 / math.sqrt(d):
        raise PreconditionError(
            f"moment bound needs s > 3/sqrt(d) = {3.0 / math.sqrt(d):.6g}, got s = {s:.6g}"
        )
    raw = d * math.exp(-s * s * d / 2.2)
    return _clamped(raw, "smoothness_tail_khintchine", {"s": s, "d": d})


def dataset_smoothness_failure_bound(n: int, d: int, c: float = 7.0) -> TailBound:
    """Probability that a sampled sign diagonal fails to be smooth.

    With s^2 d = c ln(n^2 d), the union of the per-pair moment bounds
    over all difference vectors collapses to exp(-c/2.2) regardless of
    the dataset size; c = 7 keeps it below 1/20.
    """
    if n < 1 or d < 1:
        raise DomainError(f"n and d must be positive, got n={n}, d={d}")
    if c < 0 or not math.isfinite(c):
        raise DomainError(f"c must be nonnegative, got {c}")
    if n * n * d < 3.7:
        raise PreconditionError(
            f"n^2*d must be at least 3.7 so s clears the moment bound's floor, got {n * n * d}"
        )
    raw = math.exp(-c / 2.2)
    bound = _clamped(raw, "dataset_smoothness_failure_bound", {"n": n, "d": d, "c": c})
    if c == 7.0:
        assert bound.value <= 1.0 / 20.0
    return bound


def shrinkage_bound(epsilon: float, k: int) -> TailBound:
    """Bound (3 eps)^k on the embedded norm collapsing below eps.

    This is the chi-square lower tail at t = 2 eps^2 loosened through
    (e t)^(k/2) = (2e)^(k/2) eps^k <= (3 eps)^k.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    raw = (3.0 * epsilon) ** k
    return _clamped(raw, "shrinkage_bound", {"epsilon": epsilon, "k": k})


def chi_square_lower_tail(t: float, k: int) -> TailBound:
    """Lower-tail bound for a sum of k squared standard normals.

    The moment-generating-function argument gives
    P[sum <= t] <= exp((k - t)/2) (t/k)^(k/2), optimal over the
    exponential tilt.  See :func:`chi_square_lower_tail_loose` for the
    simplified form; the tight form never exceeds it, which is asserted
    here on the t <= 1/e range where the loose form is itself below 1.
    """
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    if not 0.0 < t <= k:
        raise DomainError(f"t must lie in (0, k], got t={t}, k={k}")
    log_tight = (k - t) / 2.0 + (k / 2.0) * math.log(t / k)
    raw = math.exp(log_tight)
    if t <= 1.0 / math.e:
        loose = chi_square_lower_tail_loose(t, k)
        assert raw <= min(1.0, loose.raw) + 1e-300, "tight form escaped the loosened one"
    return _clamped(raw, "chi_square_lower_tail", {"t": t, "k": k})


def chi_square_lower_tail_loose(t: float, k: int) -> TailBound:
    """Simplified (e t)^(k/2) form of the chi-square lower tail.

    Obtained from the tight form by discarding the exp(-t/2) k^(-k/2)
    factors; at t = 2 eps^2 it becomes (2e)^(k/2) eps^k <= (3 eps)^k,
    the shrinkage bound.
    """
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    log_loose = (k / 2.0) * (1.0 + math.log(t))
    raw = math.exp(log_loose) if log_loose < 700 else math.inf
    return _clamped(raw, "chi_square_lower_tail_loose", {"t": t, "k": k})
