import math

import numpy as np
import pytest
from scipy.integrate import quad

from clwekit.numerics import (
    GaussianParam,
    TestReport,
    center_mod,
    chi2_uniform_modq,
    discrete_gaussian_pmf,
    discrete_gaussian_support,
    gaussian_cdf,
    ks_test,
    min_entropy_sparse,
    rho,
    smoothing_bound,
    tv_estimate,
    wrap_mod,
    wrapped_gaussian_cdf,
)
from clwekit.samplers import RngStream, sample_continuous_gaussian, sample_discrete_gaussian


def test_rho_at_center_is_one():
    g = GaussianParam(2.5, np.array([1.0, -3.0, 0.5]))
    assert rho(np.array([1.0, -3.0, 0.5]), g) == 1.0


def test_rho_one_width_off_center():
    # direct evaluation of the closed form at x = c + s*e1, s = 1
    g = GaussianParam(1.0, np.zeros(4))
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert rho(x, g) == pytest.approx(0.04321391826377226, rel=1e-14)


def test_rho_scale_invariance():
    # scaling (x - c) and s jointly leaves ||(x-c)/s|| unchanged
    rng = np.random.default_rng(0)
    c = rng.normal(size=5)
    d = rng.normal(size=5)
    for t in (0.1, 1.0, 7.5):
        a = rho(c + d, GaussianParam(2.0, c))
        b = rho(c + t * d, GaussianParam(2.0 * t, c))
        assert a == pytest.approx(b, rel=1e-12)


def test_rho_symmetric_about_center():
    rng = np.random.default_rng(1)
    c = rng.normal(size=3)
    for _ in range(50):
        d = rng.normal(size=3)
        g = GaussianParam(1.7, c)
        assert abs(rho(c + d, g) - rho(c - d, g)) <= 1e-12


def test_rho_dimension_mismatch():
    with pytest.raises(ValueError):
        rho(np.zeros(3), GaussianParam(1.0, np.zeros(2)))


def test_smoothing_bound_values():
    assert smoothing_bound(1, 2.0 ** -40) == pytest.approx(3.007666804394896, rel=1e-12)
    assert smoothing_bound(2, 0.5) == pytest.approx(0.8893651403508926, rel=1e-12)


def test_smoothing_bound_monotone():
    eps_grid = [2.0 ** -e for e in range(1, 60, 7)]
    for n in (1, 4, 64):
        vals = [smoothing_bound(n, e) for e in eps_grid]
        assert all(a <= b for a, b in zip(vals, vals[1:]))  # smaller eps, larger bound
    for eps in (0.5, 2.0 ** -20):
        vals = [smoothing_bound(n, eps) for n in (1, 2, 8, 128)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_smoothing_bound_eps_range():
    for bad in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            smoothing_bound(4, bad)


def test_min_entropy_values():
    assert min_entropy_sparse(4, 1) == pytest.approx(3.0)
    for k in (1, 3, 9):
        assert min_entropy_sparse(k, k) == pytest.approx(k)  # only sign freedom left
    with pytest.raises(ValueError):
        min_entropy_sparse(3, 4)


def test_min_entropy_lower_bound():
    for n in (4, 16, 64, 257):
        for k in range(1, n + 1, max(1, n // 7)):
            assert min_entropy_sparse(n, k) >= k * math.log2(n / k) - 1e-9


def test_center_and_wrap_mod():
    x = np.array([0.0, 0.49, 0.5, 0.51, 1.25, -0.5, -1.75])
    c = center_mod(x, 1.0)
    assert np.all(c >= -0.5) and np.all(c < 0.5)
    assert np.allclose(wrap_mod(c - x, 1.0), 0.0)
    w = wrap_mod(x, 1.0)
    assert np.all(w >= 0.0) and np.all(w < 1.0)


def test_ks_null_calibration_single():
    rng = RngStream(11)
    x = sample_continuous_gaussian(1.0, 1, rng, 100_000)[:, 0]
    rep = ks_test(x, gaussian_cdf(1.0), threshold=0.001)
    assert rep.passed


def test_ks_degenerate_alternative():
    rep = ks_test(np.zeros(500), gaussian_cdf(1.0), threshold=0.001)
    assert rep.statistic >= 0.5
    assert not rep.passed


def test_ks_power_wrong_width():
    # width-beta samples against a width-2*beta reference must be rejected
    rng = RngStream(12)
    beta = 0.3
    x = sample_continuous_gaussian(beta, 1, rng, 10_000)[:, 0]
    rep = ks_test(x, gaussian_cdf(2.0 * beta), threshold=0.001)
    assert not rep.passed


def test_ks_input_validation():
    with pytest.raises(ValueError):
        ks_test(np.zeros(5), gaussian_cdf(1.0))
    with pytest.raises(ValueError):
        ks_test(np.linspace(0, 1, 50), lambda x: -x)  # decreasing cdf


def test_chi2_uniform_null():
    rng = RngStream(13)
    x = rng.gen.integers(0, 17, size=10_000)
    assert chi2_uniform_modq(x, 17, threshold=0.001).passed


def test_chi2_uniform_degenerate():
    assert not chi2_uniform_modq(np.zeros(1000, dtype=np.int64), 17, threshold=0.001).passed


def test_chi2_narrow_gaussian_mod_q_fails():
    # residues of a width-0.3 integer Gaussian concentrate near 0 mod 17
    rng = RngStream(14)
    x = np.round(sample_discrete_gaussian(0.3, 0.0, rng, size=5000)).astype(np.int64)
    assert not chi2_uniform_modq(x, 17, threshold=0.001).passed


def test_chi2_bucketing_large_q():
    rng = RngStream(15)
    q = 2 ** 16
    x = rng.gen.integers(0, q, size=50_000)
    rep = chi2_uniform_modq(x, q, threshold=0.001)
    assert rep.passed
    with pytest.raises(ValueError):
        chi2_uniform_modq(x[:4], q)


def test_tv_identical_and_disjoint():
    rng = np.random.default_rng(2)
    a = rng.normal(size=2000)
    assert tv_estimate(a, a.copy(), bins=50) == 0.0
    b = a + 100.0
    assert tv_estimate(a, b, bins=50) == pytest.approx(1.0)


def test_tv_symmetry_and_range():
    rng = np.random.default_rng(3)
    a = rng.normal(size=3000)
    b = rng.normal(size=3000) * 1.3
    t1 = tv_estimate(a, b, bins=60)
    t2 = tv_estimate(b, a, bins=60)
    assert t1 == pytest.approx(t2)
    assert 0.0 <= t1 <= 1.0


def test_tv_against_quadrature_oracle():
    # oracle: numerical integration of half the absolute density difference
    # between width-1 and width-1.1 Gaussians
    f = lambda x: abs(math.exp(-math.pi * x * x) - math.exp(-math.pi * (x / 1.1) ** 2) / 1.1)
    oracle = quad(f, -8, 8, limit=200)[0] / 2.0
    rng = RngStream(16)
    a = sample_continuous_gaussian(1.0, 1, rng, 1_000_000)[:, 0]
    b = sample_continuous_gaussian(1.1, 1, rng, 1_000_000)[:, 0]
    est = tv_estimate(a, b, bins=200)
    assert est == pytest.approx(oracle, abs=0.01)


def test_tv_dimension_mismatch():
    with pytest.raises(ValueError):
        tv_estimate(np.zeros((10, 2)), np.zeros((10, 3)))


def test_wrapped_cdf_matches_plain_for_thin_widths():
    x = np.linspace(-0.5, 0.4999, 101)
    thin = wrapped_gaussian_cdf(0.05, 1.0)(x)
    plain = gaussian_cdf(0.05)(x)
    assert np.allclose(thin, plain, atol=1e-12)


def test_report_invariants():
    with pytest.raises(ValueError):
        TestReport("x", 0.0, 1.5, 10, 0.01, True)
    with pytest.raises(ValueError):
        TestReport("x", 0.0, 0.5, 10, 0.01, False)  # verdict contradicts threshold


def test_discrete_gaussian_pmf_support():
    pts = discrete_gaussian_support(3.0)
    assert pts[0] == -36 and pts[-1] == 36
    p = discrete_gaussian_pmf(3.0, pts)
    assert p.sum() == pytest.approx(1.0)
    assert p[len(p) // 2] == p.max()
