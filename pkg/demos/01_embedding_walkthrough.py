"""
End-to-end embedding walkthrough
================================

Build a low-dimensional sketch of a point cloud that lives near a 2-d
plane inside R^512, and audit what the sketch did to every point's
nearest neighbor.  This is the whole pipeline a user of the library
touches: dataset, doubling constant, parameter selection, transform,
neighbor audit, and the on-disk artifacts.
"""

import tempfile
from pathlib import Path

from fnnpe import (
    doubling_constant_greedy,
    load_transform,
    planted_plane_dataset,
    sample_fjlt,
    save_transform,
    select_params,
    verify_nn_preservation,
)

dataset = planted_plane_dataset(n=500, d=512, noise=0.01, seed=7)
print(f"dataset: {dataset.n} points in R^{dataset.d} (near a 2-d affine plane)")

# The target dimension depends on how clustered the data is, summarized
# by the doubling constant: the number of half-radius balls needed to
# cover any ball.  Flat data comes out small.
doubling = doubling_constant_greedy(dataset)
print(f"greedy doubling constant: {doubling.value} "
      f"(witness: ball around point {doubling.witness[0]} at radius {doubling.witness[1]:.3f})")

params = select_params(dataset.n, dataset.d, epsilon=0.5, delta=0.1, lam=float(doubling.value))
print(f"selected: k={params.k}, density q={params.q:.3f}, smoothness level s={params.s:.3f}")
print(f"dimension reduction: {dataset.d} -> {params.k} "
      f"({dataset.d / params.k:.0f}x smaller)")

transform = sample_fjlt(params, seed=2024)
embedded = transform.apply_batch(dataset, normalized=True)
print(f"\nembedded {embedded.n} points; projection stores {transform.projection.nnz} nonzeros "
      f"instead of {params.k * params.d} dense entries")

report = verify_nn_preservation(dataset, embedded, epsilon=0.5)
print(f"neighborhood kept within (1+eps): {report.p1_rate:.1%} of points")
print(f"no far point intruding:           {report.p2_rate:.1%} of points")
print(f"both properties:                  {report.joint_rate:.1%} of points")
for x, y, orig, emb in report.p2_witnesses[:3]:
    print(f"  intrusion: point {y} was {orig:.2f} away from point {x}, lands at {emb:.2f}")

# The transform itself is a small JSON artifact; reloading it gives the
# identical embedding, which is what makes experiments replayable.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "plane.transform.json"
    save_transform(transform, path)
    replay = load_transform(path)
    delta = abs(replay.apply(dataset.points[0]) - transform.apply(dataset.points[0])).max()
    print(f"\nsaved transform to {path.name} ({path.stat().st_size} bytes), "
          f"replayed first point, max deviation {delta:.1e}")
