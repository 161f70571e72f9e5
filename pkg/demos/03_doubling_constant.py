"""
Measuring how clustered a point set is
======================================

The doubling constant is the largest number of half-radius balls needed
to cover any ball in the set.  A line of points doubles with 2 balls, a
filled plane with ~4, a high-dimensional blob with exponentially many.
The library has an exhaustive search for tiny sets and a greedy upper
bound for real ones; this script shows both and why the greedy answer
can be trusted (it never undershoots).
"""

import numpy as np

from fnnpe import (
    doubling_constant_exact,
    doubling_constant_greedy,
    gaussian_dataset,
    make_dataset,
    planted_plane_dataset,
)

print("two points: any ball holding both needs 2 half-radius balls")
two = make_dataset([[0.0, 0.0], [1.0, 0.0]])
print(f"   exact: {doubling_constant_exact(two).value}, "
      f"greedy: {doubling_constant_greedy(two).value}")

print()
print("exact vs greedy on 15 random small instances (greedy >= exact always)")
rng = np.random.default_rng(0)
for trial in range(15):
    n = int(rng.integers(3, 13))
    points = rng.standard_normal((n, 4))
    ds = make_dataset(points)
    exact = doubling_constant_exact(ds)
    greedy = doubling_constant_greedy(ds)
    marker = "=" if greedy.value == exact.value else "<"
    print(f"   n={n:2d}: exact {exact.value:2d} {marker} greedy {greedy.value:2d}")

print()
print("structure shows up in the estimate (500 points each):")
flat = planted_plane_dataset(n=500, d=256, noise=0.01, seed=1)
blob = gaussian_dataset(n=500, d=256, seed=1)
est_flat = doubling_constant_greedy(flat)
est_blob = doubling_constant_greedy(blob)
print(f"   near-planar cloud in R^256:  {est_flat.value}")
print(f"   isotropic gaussian in R^256: {est_blob.value}")
print()
print("the planar set needs a smaller sketch for the same guarantee,")
print("because the selected dimension grows with log2 of this number")
