#!/usr/bin/env python3
"""Tour of the randomness sources.

Width convention throughout: a Gaussian of width s has density proportional
to exp(-pi (x/s)^2), i.e. variance s^2/(2 pi). Everything is driven by a
counter-based stream, so rerunning this script reproduces the same numbers.
"""

import math

import numpy as np

from clwekit.numerics import discrete_gaussian_pmf, discrete_gaussian_support, smoothing_bound
from clwekit.samplers import (
    RngStream,
    sample_continuous_gaussian,
    sample_discrete_gaussian,
    sample_rotation,
    sample_sparse_secret,
)

rng = RngStream(seed=1)

print("== continuous Gaussian ==")
x = sample_continuous_gaussian(1.0, 1, rng, 200_000)[:, 0]
print(f"width 1.0: empirical variance {x.var():.5f} vs 1/(2 pi) = {1/(2*math.pi):.5f}")

print("\n== discrete Gaussian on Z ==")
d = sample_discrete_gaussian(3.0, 0.0, rng, size=200_000)
pts = discrete_gaussian_support(3.0)
pmf = discrete_gaussian_pmf(3.0, pts)
target_var = float((pts.astype(float) ** 2 * pmf).sum())
print(f"width 3.0: empirical variance {d.var():.4f} vs exact table sum {target_var:.4f}")

print("\n== coset Gaussian on Z + c ==")
c = 0.25
y = sample_discrete_gaussian(3.0, c, rng, size=10)
print(f"coset c = {c}: draws {y}")
print(f"all draws minus c are integers: {np.array_equal(y - c, np.round(y - c))}")

print("\n== how wide must a Gaussian be to smooth Z? ==")
for eps in (0.5, 2.0 ** -20, 2.0 ** -40):
    print(f"  eps = {eps:.3g}: width bound {smoothing_bound(1, eps):.4f}")
print("adding a Gaussian of at least that width to a uniform residue makes the")
print("result eps-close to uniform on the torus; the reductions lean on this.")

print("\n== sparse secrets and rotations ==")
s = sample_sparse_secret(10, 3, rng)
print(f"3-sparse sign vector in dimension 10: {s.entries}, norm {s.norm:.4f}")
R = sample_rotation(4, rng)
print(f"Haar rotation, ||R^T R - I||_max = {np.abs(R.T @ R - np.eye(4)).max():.2e}")
print(f"rotation applied to e1 gives a uniform unit vector: {R[:, 0].round(4)}")
