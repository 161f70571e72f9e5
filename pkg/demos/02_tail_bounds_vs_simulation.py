"""
Closed-form tail bounds against simulation
==========================================

The library's guarantees rest on a handful of probability bounds.  Each
has a closed form that can be evaluated in microseconds; this script
re-derives the same quantities by brute-force sampling and prints them
side by side.  The analytic column should always dominate (it is an
upper bound, usually a loose one).
"""

import dataclasses

import numpy as np

from fnnpe import (
    dataset_smoothness_failure_bound,
    mc_shrinkage,
    mc_zi_concentration,
    run_smoothness_suite,
    select_params,
    shrinkage_bound,
)

print("1. A random sign diagonal fails to keep a dataset smooth")
print("-" * 60)
out = run_smoothness_suite(n=64, d=256, n_diagonals=200, seed=1)
bound = dataset_smoothness_failure_bound(64, 256)
print(f"   simulated over 200 diagonals: {out['p_hat']:.4f}")
print(f"   closed form exp(-7/2.2):      {bound.value:.4f}")
print(f"   worst blow-up ratio seen:     {out['worst_ratio_seen']:.3f} (allowed {out['config']['s']:.3f})")

print()
print("2. An embedded norm collapses below eps * original")
print("-" * 60)
params = select_params(64, 256, epsilon=0.2, delta=0.1, lam=2.0)
for k in (4, 8):
    cell = dataclasses.replace(params, k=k)
    est = mc_shrinkage(cell, trials=50_000, seed=2)
    print(f"   k={k:2d}: simulated {est.p_hat:.2e}   closed form (3eps)^k = {shrinkage_bound(0.2, k).value:.2e}")

print()
print("3. A projection row captures less than half its share of mass")
print("-" * 60)
est = mc_zi_concentration(q=params.q, d=256, k=8, s=params.s, trials=2_000, seed=3)
print(f"   simulated: {est.p_hat:.4f}   budgeted: {est.analytic_bound.value:.4f}")

print()
print("4. Where the two smoothness tails trade places")
print("-" * 60)
from fnnpe import (
    KHINTCHINE_CHERNOFF_CROSSOVER,
    smoothness_tail_chernoff,
    smoothness_tail_khintchine,
)

d = 256
print(f"   crossover at s^2 d = {KHINTCHINE_CHERNOFF_CROSSOVER:.3f}")
for x in (10.0, 14.0, 15.249, 18.0, 30.0):
    s = np.sqrt(x / d)
    moment = smoothness_tail_khintchine(s, d).raw
    hoeffding = smoothness_tail_chernoff(s, d).raw
    winner = "moment" if moment <= hoeffding else "hoeffding"
    print(f"   s^2 d = {x:6.3f}: moment {moment:.3e} vs hoeffding {hoeffding:.3e} -> {winner}")
