#!/usr/bin/env python3
"""The four-step pipeline from fixed-norm LWE to CLWE, and the reverse maps.

The forward direction smooths discrete errors and samples onto the torus,
Gaussianizes the samples through coset preimages, and finally rotates the
secret onto a uniformly random direction. The planted secret survives every
step (up to the final 1/r scaling and rotation), which is what lets us verify
each stage with residual statistics.
"""

import math

import numpy as np

from clwekit.distributions import LweParams, gen_lwe, gen_null
from clwekit.numerics import center_mod, chi2_uniform_modq, gaussian_cdf, ks_test, wrapped_gaussian_cdf
from clwekit.pipeline import plan, reverse_discretize, reverse_scale, run_pipeline
from clwekit.samplers import RngStream, SecretVector, sample_sparse_secret

rng = RngStream(seed=4)

n, m, q, k, sigma = 8, 10_000, 2 ** 20, 2, 16.0
r = math.sqrt(k)
p = plan(n, m, q, r, sigma, c_slack=4.0)
print("== the plan: every hidden constant made explicit ==")
for key, val in p.as_dict().items():
    print(f"  {key:12s} = {val}")

print("\n== forward: planted fixed-norm LWE -> CLWE ==")
s = sample_sparse_secret(n, k, rng)
secret = SecretVector(s.entries, "fixed-norm", 1.0, k)
batch = gen_lwe(LweParams(n, m, q, sigma), secret, rng=rng)
out, w = run_pipeline(batch, p, rng, secret)
print(f"in: {batch.m} samples over Z_{q}; out: {out.m} CLWE samples (count preserved)")
resid = center_mod(out.b - p.gamma * (out.a @ w.vector()), 1.0)
rep = ks_test(resid, wrapped_gaussian_cdf(p.beta, 1.0))
print(f"planted residuals vs width-beta Gaussian: KS p = {rep.p_value:.3f}")

null_out, _ = run_pipeline(gen_null("lwe-discrete", n, m, rng, q=q), p, rng)
rep_a = ks_test(null_out.a.ravel(), gaussian_cdf(1.0))
rep_b = ks_test(null_out.b, lambda t: np.clip(t, 0, 1))
print(f"null input maps to null output: a KS p = {rep_a.p_value:.3f}, b KS p = {rep_b.p_value:.3f}")

print("\n== reverse: integer-coset CLWE -> LWE over Z_q ==")
from clwekit.distributions import ClweParams, gen_clwe

q2, tau = 2 ** 16, 3.27
beta2 = 16.0 / q2
scaled = s.scaled(1.0 / r, "scaled-sparse")
cb = gen_clwe(ClweParams(n, 20_000, r * tau, beta2), scaled, rng=rng)
cont, s_back = reverse_scale(cb, q2, tau, scaled)
disc = reverse_discretize(cont, tau, rng)
print(f"recovered integer secret equals the original: {np.array_equal(s_back.entries, s.entries)}")
rep = chi2_uniform_modq(disc.a, q2)
print(f"discretized samples uniform over Z_{q2}: chi2 p = {rep.p_value:.3f}")
width = math.sqrt((beta2 * q2) ** 2 + r * r * tau * tau)
rep = ks_test(center_mod(disc.b - disc.a @ s_back.entries, q2), wrapped_gaussian_cdf(width, q2))
print(f"residual width grows to {width:.2f}: KS p = {rep.p_value:.3f}")
