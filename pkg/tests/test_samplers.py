import math

import numpy as np
import pytest

from clwekit.numerics import (
    chi2_gof,
    chi2_uniform_modq,
    discrete_gaussian_pmf,
    discrete_gaussian_support,
    gaussian_cdf,
    ks_test,
)
from clwekit.samplers import (
    SAMPLER_STATS,
    RngStream,
    SecretVector,
    sample_continuous_gaussian,
    sample_discrete_gaussian,
    sample_rotation,
    sample_sparse_secret,
    sample_uniform_modq,
    sample_uniform_torus,
    sample_unit_secret,
)


def test_equal_seeds_bitwise_equal():
    for draw in (
        lambda r: sample_continuous_gaussian(2.0, 4, r, 100),
        lambda r: sample_discrete_gaussian(3.0, 0.7, r, size=100),
        lambda r: sample_uniform_modq(97, 5, r, 20),
        lambda r: sample_uniform_torus(4.0, 5, r, 20),
        lambda r: sample_sparse_secret(10, 3, r).entries,
        lambda r: sample_rotation(6, r),
    ):
        a = draw(RngStream(12345, stream=9))
        b = draw(RngStream(12345, stream=9))
        assert np.array_equal(a, b)


def test_child_streams_differ():
    root = RngStream(5)
    a = root.child(0).gen.random(8)
    b = root.child(1).gen.random(8)
    assert not np.array_equal(a, b)
    # child derivation is itself deterministic
    c = RngStream(5).child(0).gen.random(8)
    assert np.array_equal(a, c)


def test_continuous_gaussian_moments():
    rng = RngStream(21)
    x = sample_continuous_gaussian(1.0, 1, rng, 1_000_000)[:, 0]
    var = x.var()
    assert abs(var - 1.0 / (2 * math.pi)) < 0.01 * (1.0 / (2 * math.pi))
    sd = math.sqrt(1.0 / (2 * math.pi))
    assert abs(x.mean()) < 4 * sd / math.sqrt(x.size)


def test_continuous_gaussian_ks():
    rng = RngStream(22)
    x = sample_continuous_gaussian(1.0, 1, rng, 100_000)[:, 0]
    assert ks_test(x, gaussian_cdf(1.0), threshold=0.001).passed


def test_continuous_gaussian_center():
    from clwekit.numerics import GaussianParam

    rng = RngStream(23)
    g = GaussianParam(0.5, np.array([3.0, -1.0]))
    x = sample_continuous_gaussian(g, 2, rng, 50_000)
    assert np.allclose(x.mean(axis=0), [3.0, -1.0], atol=0.01)


def test_discrete_gaussian_chi2_against_exact_pmf():
    rng = RngStream(24)
    x = np.round(sample_discrete_gaussian(3.0, 0.0, rng, size=200_000)).astype(np.int64)
    pts = discrete_gaussian_support(3.0)
    rep = chi2_gof(x, pts, discrete_gaussian_pmf(3.0, pts), threshold=0.001)
    assert rep.passed


def test_discrete_gaussian_coset_support():
    rng = RngStream(25)
    x = sample_discrete_gaussian(3.0, 0.25, rng, size=10_000)
    frac = x - 0.25
    assert np.array_equal(frac, np.round(frac))  # support is exactly Z + 0.25


def test_discrete_gaussian_coset_congruence_generic():
    rng = RngStream(26)
    c = 0.123456789123456
    x = sample_discrete_gaussian(2.0, c, rng, size=100_000)
    d = x - c
    assert np.max(np.abs(d - np.round(d))) < 1e-12


def test_discrete_gaussian_tiny_width():
    rng = RngStream(27)
    x = sample_discrete_gaussian(0.1, 0.0, rng, size=100_000)
    assert np.all(x == 0.0)  # mass off the origin is ~exp(-100*pi)


def test_discrete_gaussian_single_point_counter():
    rng = RngStream(28)
    before = SAMPLER_STATS["single_point_support"]
    sample_discrete_gaussian(0.01, 0.0, rng, size=10)  # off-origin weights underflow
    assert SAMPLER_STATS["single_point_support"] >= before + 10


def test_discrete_gaussian_moment_oracle():
    # oracle: direct summation of x^2 rho(x) / sum rho(x) over the table
    rng = RngStream(29)
    for sigma in (3.0, 5.0):
        pts = discrete_gaussian_support(sigma).astype(float)
        p = discrete_gaussian_pmf(sigma, pts)
        target = float((pts ** 2 * p).sum())
        x = sample_discrete_gaussian(sigma, 0.0, rng, size=1_000_000)
        assert abs(x.var() - target) < 0.01 * target


def test_discrete_gaussian_param_validation():
    with pytest.raises(ValueError):
        sample_discrete_gaussian(-1.0, 0.0, RngStream(0), size=1)


def test_uniform_modq_chi2():
    rng = RngStream(30)
    x = sample_uniform_modq(17, 1, rng, 10_000)
    assert chi2_uniform_modq(x, 17, threshold=0.001).passed


def test_uniform_torus_ks_and_mean():
    rng = RngStream(31)
    x = sample_uniform_torus(1.0, 1, rng, 100_000)[:, 0]
    assert ks_test(x, lambda t: np.clip(t, 0, 1), threshold=0.001).passed
    for q in (1.0, 8.0):
        y = sample_uniform_torus(q, 1, rng, 100_000)[:, 0]
        assert abs(y.mean() - q / 2) < 4 * q / math.sqrt(12 * y.size)


def test_sparse_secret_shape():
    rng = RngStream(32)
    for _ in range(200):
        s = sample_sparse_secret(12, 4, rng)
        nz = s.entries[s.entries != 0]
        assert nz.size == 4 and np.all(np.isin(nz, (-1, 1)))
        assert s.entries @ s.entries == 4  # norm sqrt(k), exactly in integers
    with pytest.raises(ValueError):
        sample_sparse_secret(3, 4, rng)


def test_sparse_secret_uniform_over_s42():
    # enumerate the 24 elements of the (4,2) sparse family and check frequencies
    rng = RngStream(33)
    n_draws = 100_000
    counts = {}
    for _ in range(n_draws):
        s = tuple(sample_sparse_secret(4, 2, rng).entries.tolist())
        counts[s] = counts.get(s, 0) + 1
    assert len(counts) == 24
    p = 1.0 / 24
    sd = math.sqrt(n_draws * p * (1 - p))
    for c in counts.values():
        assert abs(c - n_draws * p) <= 4 * sd


def test_rotation_orthogonality():
    rng = RngStream(34)
    for _ in range(100):
        R = sample_rotation(16, rng)
        assert np.max(np.abs(R.T @ R - np.eye(16))) <= 1e-9
        assert abs(abs(np.linalg.det(R)) - 1.0) < 1e-6


def test_rotation_sphere_marginal():
    # first column of a Haar rotation is uniform on the sphere; for n=3 each
    # coordinate of a uniform sphere point has density 1/2 on [-1, 1]
    rng = RngStream(35)
    xs = np.array([sample_rotation(3, rng)[0, 0] for _ in range(20_000)])
    assert ks_test(xs, lambda t: np.clip((t + 1) / 2, 0, 1), threshold=0.001).passed


def test_unit_secret_norm():
    rng = RngStream(36)
    for n in (2, 5, 33):
        w = sample_unit_secret(n, rng)
        assert abs(np.linalg.norm(w.entries) - 1.0) <= 1e-9
        assert w.domain == "unit"


def test_secret_vector_validation():
    with pytest.raises(ValueError):
        SecretVector(np.array([1, 1, 0]), "sparse", k=3)
    with pytest.raises(ValueError):
        SecretVector(np.array([0.5, 0.5]), "unit")
    s = SecretVector(np.array([1, -1, 0, 0]), "sparse")
    assert s.k == 2 and s.norm == pytest.approx(math.sqrt(2))
    scaled = s.scaled(1.0 / math.sqrt(2), "scaled-sparse")
    assert np.linalg.norm(scaled.vector()) == pytest.approx(1.0)
    back = SecretVector.from_dict(scaled.as_dict())
    assert np.array_equal(back.entries, scaled.entries) and back.scale == scaled.scale
