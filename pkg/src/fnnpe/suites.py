"""Named verification scenarios shared by the CLI and the test suite.

Each ``run_*_suite`` function builds its synthetic data, runs the
matching Monte-Carlo operation at documented defaults, and returns a
JSON-ready payload with a ``passed`` flag.  The acceptance tests call
these with their published parameters, so the CLI and the tests can
never drift apart.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np

from .bounds import dataset_smoothness_failure_bound
from .core import DataSet, derive_rng, make_dataset, select_params, standard_normals
from .core import DEFAULT_C_DIM, DEFAULT_C_SMOOTH, DEFAULT_C_SPARSITY
from .errors import NoReductionWarning
from .fjlt import sample_fjlt, sample_sign_diagonal
from .metrics import doubling_constant_greedy
from .verification import (
    check_smoothness,
    dominance_holds,
    mc_distortion,
    mc_gaussian_dominance,
    mc_shrinkage,
    mc_two_stability,
    mc_zi_concentration,
    verify_nn_preservation,
)

SUITE_NAMES = ("smoothness", "zi", "distortion", "shrinkage", "nn", "gaussian-appendix")


def gaussian_dataset(n: int, d: int, seed: int = 0) -> DataSet:
    """n standard-normal points in R^d (d should be a power of two)."""
    return make_dataset(standard_normals(derive_rng(seed, 100), (n, d)))


def planted_plane_dataset(n: int, d: int, noise: float = 0.01, seed: int = 0) -> DataSet:
    """Points near a random 2-d affine subspace of R^d.

    Coordinates are built from two orthonormal directions plus an offset
    and isotropic Gaussian noise whose vector norm is about ``noise``
    times the in-plane spread, so the set keeps a low doubling constant.
    """
    rng = derive_rng(seed, 101)
    basis, _ = np.linalg.qr(standard_normals(rng, (d, 2)))
    coeffs = standard_normals(rng, (n, 2)) * 10.0
    offset = standard_normals(rng, d)
    points = offset + coeffs @ basis.T
    spread = float(np.sqrt((coeffs**2).sum(axis=1).mean()))
    sigma = noise * spread / math.sqrt(d)
    points = points + standard_normals(rng, (n, d)) * sigma
    return make_dataset(points)


def run_smoothness_suite(
    n: int = 64,
    d: int = 256,
    n_diagonals: int = 400,
    c_smooth: float = DEFAULT_C_SMOOTH,
    seed: int = 0,
) -> dict:
    """Resample sign diagonals and count datasets that fail smoothness.

    The fraction of non-smooth diagonals is compared against the
    exp(-c/2.2) failure budget with a three-standard-error slack.
    """
    dataset = gaussian_dataset(n, d, seed=seed)
    s = min(1.0, math.sqrt(c_smooth * math.log(n * n * d) / d))
    failures = 0
    worst = 0.0
    for i in range(n_diagonals):
        diag = sample_sign_diagonal(d, derive_rng(seed, 1, i))
        report = check_smoothness(diag, dataset, s)
        worst = max(worst, report.max_ratio)
        failures += not report.is_smooth
    bound = dataset_smoothness_failure_bound(n, d, c_smooth)
    p_hat = failures / n_diagonals
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / n_diagonals)
    passed = p_hat <= bound.value + 3.0 * std_err
    return {
        "suite": "smoothness",
        "config": {"n": n, "d": d, "n_diagonals": n_diagonals, "c_smooth": c_smooth, "s": s, "seed": seed},
        "failures": failures,
        "p_hat": p_hat,
        "std_err": std_err,
        "worst_ratio_seen": worst,
        "analytic_bound": bound.value,
        "passed": bool(passed),
    }


def run_zi_suite(
    n: int = 1000,
    d: int = 1024,
    k: int = 32,
    trials: int = 2000,
    c_smooth: float = DEFAULT_C_SMOOTH,
    c_sparsity: float = DEFAULT_C_SPARSITY,
    seed: int = 0,
) -> dict:
    """Row-mass concentration at the density the size parameters imply."""
    s = min(1.0, math.sqrt(c_smooth * math.log(n * n * d) / d))
    q = min(c_sparsity * s * s, 1.0)
    est = mc_zi_concentration(q=q, d=d, k=k, s=s, trials=trials, seed=seed)
    return {
        "suite": "zi",
        "config": {"n": n, "d": d, "k": k, "q": q, "s": s, "trials": trials, "seed": seed},
        "failures": est.successes,
        "p_hat": est.p_hat,
        "std_err": est.std_err,
        "analytic_bound": est.analytic_bound.value,
        "passed": bool(est.within_bound()),
    }


def run_distortion_suite(
    n: int = 64,
    d: int = 512,
    epsilon: float = 0.5,
    delta: float = 0.1,
    lam: float = 2.0,
    trials: int = 500,
    k_grid: tuple[int, ...] = (8, 16, 32, 64),
    diag_epsilon: float = 0.3,
    c_dim: float = DEFAULT_C_DIM,
    c_sparsity: float = DEFAULT_C_SPARSITY,
    seed: int = 0,
) -> dict:
    """Distance distortion at the selected dimension, plus the exponent sweep.

    The headline check runs at ``epsilon`` with k from the parameter
    formula and demands pooled failure frequency at most delta.  The
    diagnostic sweep reruns at milder ``diag_epsilon`` across ``k_grid``
    (the harsher epsilon would push the larger k's failure probability
    below what this many trials can observe) and fits
    log(p_hat) against k * eps^2, which should fall linearly.
    """
    dataset = gaussian_dataset(n, d, seed=seed)
    params = select_params(n, d, epsilon, delta, lam, c_sparsity=c_sparsity, c_dim=c_dim)
    headline = mc_distortion(params, dataset, trials=trials, seed=seed)

    diag_params = select_params(n, d, diag_epsilon, delta, lam, c_sparsity=c_sparsity, c_dim=c_dim)
    sweep = []
    for i, k in enumerate(k_grid):
        est = mc_distortion(diag_params, dataset, trials=trials, seed=seed + 17 + i, k_override=k)
        sweep.append({"k": k, "p_hat": est.p_hat, "x": k * diag_epsilon**2})
    xs = np.array([row["x"] for row in sweep])
    ps = np.array([row["p_hat"] for row in sweep])
    if len(sweep) >= 2 and (ps > 0).all():
        monotone = bool(np.all(np.diff(ps) < 0))
        ys = np.log(ps)
        slope, intercept = np.polyfit(xs, ys, 1)
        fit = ys - (slope * xs + intercept)
        r2 = 1.0 - float((fit**2).sum() / ((ys - ys.mean()) ** 2).sum())
        exponent_ok = monotone and slope < 0 and r2 >= 0.9
    elif sweep:
        monotone, slope, r2, exponent_ok = False, math.nan, math.nan, False
    else:
        monotone, slope, r2, exponent_ok = True, math.nan, math.nan, True

    return {
        "suite": "distortion",
        "config": {
            "n": n,
            "d": d,
            "epsilon": epsilon,
            "delta": delta,
            "lam": lam,
            "k": params.k,
            "q": params.q,
            "trials": trials,
            "diag_epsilon": diag_epsilon,
            "k_grid": list(k_grid),
            "seed": seed,
        },
        "p_hat": headline.p_hat,
        "std_err": headline.std_err,
        "worst_pair_freq": headline.details["worst_pair_freq"],
        "fitted_exponent": headline.details["fitted_exponent"],
        "delta_budget": delta,
        "headline_ok": bool(headline.p_hat <= delta),
        "sweep": sweep,
        "sweep_slope": float(slope),
        "sweep_r_squared": float(r2),
        "sweep_monotone": monotone,
        "exponent_ok": bool(exponent_ok),
        "passed": bool(headline.p_hat <= delta and exponent_ok),
    }


def run_shrinkage_suite(
    eps_grid: tuple[float, ...] = (0.1, 0.2, 0.3),
    k_grid: tuple[int, ...] = (4, 8, 16),
    n: int = 64,
    d: int = 256,
    trials: int = 100_000,
    delta: float = 0.1,
    seed: int = 0,
) -> dict:
    """Raw-norm collapse frequency against (3 eps)^k over a grid."""
    cells = []
    all_ok = True
    for i, eps in enumerate(eps_grid):
        for j, k in enumerate(k_grid):
            # k comes from the study grid, so the selected value (and its
            # reduction warning at tiny eps) is irrelevant here
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NoReductionWarning)
                params = dataclasses.replace(select_params(n, d, eps, delta, lam=2.0), k=k)
            est = mc_shrinkage(params, trials=trials, seed=seed + 31 * i + j)
            ok = est.within_bound()
            all_ok &= ok
            cells.append(
                {
                    "epsilon": eps,
                    "k": k,
                    "q": params.q,
                    "trials": trials,
                    "hits": est.successes,
                    "p_hat": est.p_hat,
                    "std_err": est.std_err,
                    "bound": est.analytic_bound.value,
                    "passed": bool(ok),
                }
            )
    return {
        "suite": "shrinkage",
        "config": {
            "eps_grid": list(eps_grid),
            "k_grid": list(k_grid),
            "n": n,
            "d": d,
            "trials": trials,
            "seed": seed,
        },
        "cells": cells,
        "passed": bool(all_ok),
    }


def run_nn_suite(
    n: int = 500,
    d: int = 512,
    epsilon: float = 0.5,
    delta: float = 0.1,
    noise: float = 0.01,
    resamplings: int = 50,
    c_smooth: float = DEFAULT_C_SMOOTH,
    c_sparsity: float = DEFAULT_C_SPARSITY,
    c_dim: float = DEFAULT_C_DIM,
    seed: int = 0,
) -> dict:
    """End-to-end neighbor preservation on a noisy planted plane.

    The doubling constant is estimated greedily from the data, the
    parameters are selected from it, and the full transform is resampled
    ``resamplings`` times; each point either keeps both neighbor
    properties under a resample or not, and the pooled per-point pass
    rate must reach 1 - delta up to three standard errors.  The delta
    budget is split evenly between the two properties.
    """
    dataset = planted_plane_dataset(n, d, noise=noise, seed=seed)
    doubling = doubling_constant_greedy(dataset)
    params = select_params(
        n, d, epsilon, delta, lam=float(doubling.value),
        c_smooth=c_smooth, c_sparsity=c_sparsity, c_dim=c_dim,
    )
    point_passes = 0
    p1_passes = 0
    p2_passes = 0
    per_resample = []
    for i in range(resamplings):
        transform = sample_fjlt(params, int(derive_rng(seed, 7, i).integers(0, 2**63)))
        embedded = transform.apply_batch(dataset, normalized=True)
        report = verify_nn_preservation(dataset, embedded, epsilon)
        point_passes += int(report.joint_flags.sum())
        p1_passes += int(report.p1_flags.sum())
        p2_passes += int(report.p2_flags.sum())
        per_resample.append(report.joint_rate)
    total = resamplings * n
    rate = point_passes / total
    std_err = math.sqrt(rate * (1.0 - rate) / total)
    target = 1.0 - delta
    passed = rate >= target - 3.0 * std_err
    return {
        "suite": "nn",
        "config": {
            "n": n,
            "d": d,
            "epsilon": epsilon,
            "delta": delta,
            "noise": noise,
            "resamplings": resamplings,
            "seed": seed,
            "params": params.to_dict(),
        },
        "doubling_estimate": doubling.value,
        "doubling_witness": list(doubling.witness),
        "k": params.k,
        "k_below_quarter_d": bool(params.k < d / 4),
        "delta_split": {"distortion": delta / 2.0, "shrinkage": delta / 2.0},
        "joint_pass_rate": rate,
        "p1_pass_rate": p1_passes / total,
        "p2_pass_rate": p2_passes / total,
        "std_err": std_err,
        "target": target,
        "per_resample_rates": per_resample,
        "passed": bool(passed and params.k < d / 4),
    }


def run_gaussian_appendix_suite(
    n_configs: int = 10,
    trials: int = 200_000,
    stability_trials: int = 100_000,
    seed: int = 0,
) -> dict:
    """Dominance and 2-stability spot checks behind the tail arguments.

    Dominance: for random variance profiles y >= x, the wide sum's
    probability of staying below t never beats the narrow sum's.
    2-stability: a +-weighted Gaussian combination matches the law of a
    single scaled Gaussian in mean, variance, and max CDF gap.
    """
    dominance = []
    all_ok = True
    for i in range(n_configs):
        rng = derive_rng(seed, 9, i)
        k = int(rng.integers(2, 13))
        x = rng.uniform(0.3, 2.0, size=k)
        y = x * rng.uniform(1.0, 2.5, size=k)
        t = float(x.sum() * rng.uniform(0.4, 1.2))
        narrow, wide = mc_gaussian_dominance(x, y, t, trials=trials, seed=seed + 211 + i)
        ok = dominance_holds(narrow, wide)
        all_ok &= ok
        dominance.append(
            {
                "k": k,
                "t": t,
                "p_hat_narrow": narrow.p_hat,
                "p_hat_wide": wide.p_hat,
                "std_err_narrow": narrow.std_err,
                "std_err_wide": wide.std_err,
                "passed": bool(ok),
            }
        )

    stability = []
    for i, (u, sigma) in enumerate([((3.0, 4.0), 1.0), ((1.0, 1.0, 1.0, 1.0), 0.5), ((2.0, -1.0, 0.5), 2.0)]):
        rep = mc_two_stability(u, sigma, trials=stability_trials, seed=seed + 400 + i)
        all_ok &= rep.passed
        stability.append(
            {
                "u": list(u),
                "sigma": sigma,
                "expected_variance": rep.expected_variance,
                "sample_variance": rep.sample_variance,
                "ks_gap": rep.ks_gap,
                "ks_threshold": rep.ks_threshold,
                "passed": bool(rep.passed),
            }
        )
    return {
        "suite": "gaussian-appendix",
        "config": {"n_configs": n_configs, "trials": trials, "stability_trials": stability_trials, "seed": seed},
        "dominance": dominance,
        "two_stability": stability,
        "passed": bool(all_ok),
    }


def run_suite(name: str, **kwargs) -> dict:
    """Dispatch a suite by CLI name."""
    try:
        fn = {
            "smoothness": run_smoothness_suite,
            "zi": run_zi_suite,
            "distortion": run_distortion_suite,
            "shrinkage": run_shrinkage_suite,
            "nn": run_nn_suite,
            "gaussian-appendix": run_gaussian_appendix_suite,
        }[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}") from None
    return fn(**kwargs)


def run_calibration(
    c_dim_grid: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 1.25),
    c_sparsity_grid: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 1.25),
    distortion_trials: int = 200,
    nn_resamplings: int = 20,
    zi_trials: int = 500,
    seed: int = 0,
) -> dict:
    """Sweep the leading constants and report the smallest passing ones.

    c_sparsity is swept against the row-mass suite (density too low
    starves rows of mass); c_dim against the distortion and end-to-end
    suites (dimension too low misses the delta budget).  The shipped
    defaults come from this sweep with a safety step: the smallest
    passing value is reported, the default stays at the conventional 1.0
    whenever 1.0 passes.
    """
    sparsity_results = []
    for c in c_sparsity_grid:
        out = run_zi_suite(trials=zi_trials, c_sparsity=c, seed=seed)
        sparsity_results.append({"c_sparsity": c, "p_hat": out["p_hat"], "passed": out["passed"]})
    dim_results = []
    for c in c_dim_grid:
        dist = run_distortion_suite(
            trials=distortion_trials, c_dim=c, seed=seed, k_grid=(), diag_epsilon=0.3
        )
        nn = run_nn_suite(resamplings=nn_resamplings, c_dim=c, seed=seed)
        dim_results.append(
            {
                "c_dim": c,
                "distortion_p_hat": dist["p_hat"],
                "distortion_ok": dist["headline_ok"],
                "nn_rate": nn["joint_pass_rate"],
                "nn_ok": nn["passed"],
                "passed": bool(dist["headline_ok"] and nn["passed"]),
            }
        )
    smallest_sparsity = next((r["c_sparsity"] for r in sparsity_results if r["passed"]), None)
    smallest_dim = next((r["c_dim"] for r in dim_results if r["passed"]), None)
    return {
        "suite": "calibration",
        "sparsity_sweep": sparsity_results,
        "dim_sweep": dim_results,
        "smallest_passing_c_sparsity": smallest_sparsity,
        "smallest_passing_c_dim": smallest_dim,
        "shipped_defaults": {"c_sparsity": DEFAULT_C_SPARSITY, "c_dim": DEFAULT_C_DIM},
    }
