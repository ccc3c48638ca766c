import math

import numpy as np
import pytest
from scipy.integrate import quad

from clwekit.distributions import ClweParams, gen_clwe, gen_null, gen_trunc_hclwe
from clwekit.gmm import (
    SolverParams,
    clwe_to_hclwe,
    g_for,
    gmm_experiment_params,
    package_gmm,
    solve_sparse_hclwe,
)
from clwekit.numerics import gaussian_cdf
from clwekit.samplers import RngStream, sample_continuous_gaussian, sample_sparse_secret
from clwekit.sparse import AsymptoticHypothesisWarning


def _sparse_unit(n, k, rng):
    return sample_sparse_secret(n, k, rng).scaled(1.0 / math.sqrt(k), "scaled-sparse")


def test_g_for_values():
    assert g_for(2.0, 100) == 11
    assert g_for(0.0, 100) == 1
    with pytest.raises(ValueError):
        g_for(2.0, 1)


def test_g_for_monotone():
    last = 0
    for m in (2, 10, 100, 10_000):
        g = g_for(1.5, m)
        assert g >= last
        last = g
    last = 0
    for gamma in (0.0, 0.5, 2.0, 9.0):
        g = g_for(gamma, 50)
        assert g >= last
        last = g


def test_package_gmm_shape():
    rng = RngStream(110)
    secret = _sparse_unit(5, 2, rng)
    spec = package_gmm(secret, 2.0, 0.05, 3)
    assert spec.indices.tolist() == [-1, 0, 1]
    assert spec.weights[1] == spec.weights.max()  # central component heaviest
    assert spec.weights.sum() == pytest.approx(1.0)
    spacing = np.diff(spec.means_along)
    assert np.allclose(spacing, 2.0 / (2.0 ** 2 + 0.05 ** 2))
    with pytest.raises(ValueError):
        package_gmm(sample_sparse_secret(5, 2, rng), 2.0, 0.05, 3)  # norm sqrt(2)


def test_package_gmm_density_normalized():
    # 1-D quadrature along the secret; orthogonal directions integrate to 1
    rng = RngStream(111)
    secret = _sparse_unit(4, 2, rng)
    spec = package_gmm(secret, 2.0, 0.05, 7)

    def along(t):
        return float((spec.weights *
                      np.exp(-math.pi * ((t - spec.means_along) / spec.width_along) ** 2)
                      / spec.width_along).sum())

    total = quad(along, -3, 3, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_rejection_always_accepts_zero_fiber():
    rng = RngStream(112)
    from clwekit.distributions import ClweBatch

    batch = ClweBatch(np.zeros((500, 3)), np.zeros(500))
    kept, info = clwe_to_hclwe(batch, 0.05, rng)
    assert info["n_accepted"] == 500


def test_rejection_rate_on_null_matches_quadrature():
    # oracle: integral over one period of the acceptance weight against the
    # uniform density of b
    delta = 0.05
    oracle = quad(lambda b: math.exp(-math.pi * (b / delta) ** 2), -0.5, 0.5)[0]
    rng = RngStream(113)
    null = gen_null("clwe", 4, 100_000, rng)
    _, info = clwe_to_hclwe(null, delta, rng)
    assert abs(info["acceptance_rate"] - oracle) <= 0.2 * oracle


def test_rejection_planted_projections_match_mixture():
    rng = RngStream(114)
    n, gamma, beta, delta = 4, 2.0, 0.05, 0.05
    secret = _sparse_unit(n, 2, rng)
    batch = gen_clwe(ClweParams(n, 400_000, gamma, beta), secret, rng=rng)
    kept, info = clwe_to_hclwe(batch, delta, rng)
    beta_eff = math.sqrt(beta ** 2 + delta ** 2)
    spec = package_gmm(secret, gamma, beta_eff, g_for(gamma, kept.shape[0]))
    t = kept @ spec.direction
    edges = np.linspace(t.min() - 1e-9, t.max() + 1e-9, 161)
    counts, _ = np.histogram(t, bins=edges)
    base = gaussian_cdf(spec.width_along)
    expected = np.zeros(edges.size - 1)
    for w, mu in zip(spec.weights, spec.means_along):
        expected += w * np.diff(base(edges - mu))
    expected /= expected.sum()
    tv = 0.5 * np.abs(counts / t.size - expected).sum()
    assert tv <= 0.03


def test_rejection_deterministic_given_stream():
    rng1 = RngStream(117)
    rng2 = RngStream(117)
    batch = gen_null("clwe", 3, 5000, RngStream(118))
    kept1, info1 = clwe_to_hclwe(batch, 0.1, rng1)
    kept2, info2 = clwe_to_hclwe(batch, 0.1, rng2)
    assert np.array_equal(kept1, kept2)
    assert info1 == info2


def test_rejection_delta_range():
    rng = RngStream(115)
    null = gen_null("clwe", 3, 100, rng)
    for bad in (0.0, 0.25, 0.5):
        with pytest.raises(ValueError):
            clwe_to_hclwe(null, bad, rng)


def _solver_params(n=32, k=2):
    log_inv = 8.0  # log2(1/(beta sqrt(k)))
    beta = 2.0 ** -log_inv / math.sqrt(k)
    m = math.ceil(5 * k * math.log2(n) / log_inv)
    gamma = 2.0 * math.sqrt(k * (math.log(n) + math.log(m)))
    return SolverParams(n, k, gamma, beta)


def test_solver_params_derived():
    p = _solver_params()
    assert p.m == 7
    assert p.gamma_prime == pytest.approx(math.sqrt(p.gamma ** 2 + p.beta ** 2))
    assert p.delta == pytest.approx(1.0 / (100 * p.m))
    assert p.a_thresh == pytest.approx(math.sqrt(math.log(100 * p.m)))
    assert p.modulus_f == pytest.approx(p.gamma / (2 * p.gamma_prime ** 2))  # ceil(sqrt(2)) = 2


def test_solver_params_validation():
    with pytest.raises(ValueError):
        SolverParams(32, 2, 0.5, 0.001)  # gamma below hypothesis
    with pytest.raises(ValueError):
        SolverParams(32, 2, 10.0, 0.9)  # beta*sqrt(k) >= 1


def test_solver_recovers_planted_secret():
    # the mixture is invariant under negating the secret, so both signs pass
    # the interval test and recovery is up to sign; anything else passing
    # counts as failure
    p = _solver_params()
    hits = 0
    for trial in range(10):
        rng = RngStream(1000 + trial)
        secret = _sparse_unit(p.n, p.k, rng)
        spec = package_gmm(secret, p.gamma, p.beta, g_for(p.gamma, p.m))
        x = gen_trunc_hclwe(spec, p.m, rng)
        found, info = solve_sparse_hclwe(x, p)
        if found is None:
            continue
        up_to_sign = (np.array_equal(found.entries, secret.entries)
                      or np.array_equal(found.entries, -secret.entries))
        clean = all(np.array_equal(np.abs(np.asarray(v)), np.abs(secret.entries))
                    for v in info["full_pass"])
        hits += up_to_sign and clean
    assert hits >= 9


def test_solver_rejects_null():
    p = _solver_params()
    nones = 0
    for trial in range(10):
        rng = RngStream(2000 + trial)
        x = sample_continuous_gaussian(1.0, p.n, rng, p.m)
        found, _ = solve_sparse_hclwe(x, p)
        nones += found is None
    assert nones >= 9


def test_solver_determinism_and_guards():
    p = _solver_params()
    rng = RngStream(116)
    secret = _sparse_unit(p.n, p.k, rng)
    spec = package_gmm(secret, p.gamma, p.beta, g_for(p.gamma, p.m))
    x = gen_trunc_hclwe(spec, p.m, rng)
    r1, _ = solve_sparse_hclwe(x, p)
    r2, _ = solve_sparse_hclwe(x.copy(), p)
    assert np.array_equal(r1.entries, r2.entries)
    with pytest.raises(ValueError):
        solve_sparse_hclwe(x[: p.m - 1], p)  # too few samples
    with pytest.raises(ValueError):
        solve_sparse_hclwe(x[:, :-1], p)  # wrong dimension


def test_experiment_params_poly_preset():
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore", AsymptoticHypothesisWarning)
        bundle = gmm_experiment_params("poly", 16, alpha=2.0)
    assert (bundle["n"], bundle["k"], bundle["q"]) == (256, 64, 256)
    assert bundle["sigma"] == pytest.approx(4.0)
    assert bundle["g"] == g_for(bundle["gamma"], bundle["m"])
    # at ell = 16 even the poly preset is flagged: beta*sqrt(k) exceeds 1
    with _w.catch_warnings():
        _w.simplefilter("ignore", AsymptoticHypothesisWarning)
        big = gmm_experiment_params("poly", 4096, alpha=2.0)
    assert big["feasible"]


def test_experiment_params_subexp_flags_infeasible():
    with pytest.warns(AsymptoticHypothesisWarning):
        bundle = gmm_experiment_params("subexp", 16, delta=0.5)
    assert bundle["n"] == 16 and bundle["k"] == 64
    assert not bundle["feasible"]
    assert any("k = 64 >= n = 16" in w for w in bundle["warnings"])


def test_experiment_params_unknown_preset():
    with pytest.raises(ValueError):
        gmm_experiment_params("bogus", 16)
