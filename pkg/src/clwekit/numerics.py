"""Gaussian functions, entropy/smoothing bounds, torus arithmetic and the
statistical tests (KS, chi-square, binned TV) that every other module's
verification rests on.

Width convention: a Gaussian of width s has density proportional to
exp(-pi * (x/s)^2), i.e. variance s^2 / (2*pi) per coordinate.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

__all__ = [
    "GaussianParam",
    "TestReport",
    "rho",
    "smoothing_bound",
    "min_entropy_sparse",
    "ks_test",
    "chi2_uniform_modq",
    "chi2_gof",
    "tv_estimate",
    "center_mod",
    "wrap_mod",
    "gaussian_cdf",
    "wrapped_gaussian_cdf",
    "discrete_gaussian_support",
    "discrete_gaussian_pmf",
    "fold_pmf_modq",
]


@dataclass
class GaussianParam:
    """Width s and center c of the Gaussian function exp(-pi*||(x-c)/s||^2)."""

    width: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        self.center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("center must be finite in every coordinate")


@dataclass
class TestReport:
    """Outcome of one statistical test, with a verdict at a caller threshold."""

    __test__ = False  # not a pytest class despite the name

    name: str
    statistic: float
    p_value: float
    sample_count: int
    threshold: float
    passed: bool

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value out of [0,1]: {self.p_value}")
        if self.passed != (self.p_value > self.threshold):
            raise ValueError("verdict inconsistent with threshold comparison")

    def as_dict(self):
        return {
            "name": self.name,
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "sample_count": int(self.sample_count),
            "threshold": float(self.threshold),
            "passed": bool(self.passed),
        }


def _report(name, statistic, p_value, n, threshold):
    p = float(min(max(p_value, 0.0), 1.0))
    return TestReport(name, float(statistic), p, int(n), float(threshold), p > threshold)


def rho(x, g: GaussianParam) -> float:
    """Gaussian function exp(-pi*||(x - c)/s||^2) at a point x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != g.center.shape:
        raise ValueError(f"dimension mismatch: x has shape {x.shape}, center {g.center.shape}")
    d = (x - g.center) / g.width
    return float(np.exp(-math.pi * float(np.dot(d, d))))


def smoothing_bound(n: int, eps: float) -> float:
    """Upper bound sqrt(ln(2n(1+1/eps))/pi) on the smoothing parameter of Z^n.

    For the scaled lattice q*Z^n multiply the result by q.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    return math.sqrt(math.log(2 * n * (1.0 + 1.0 / eps)) / math.pi)


def min_entropy_sparse(n: int, k: int) -> float:
    """Min-entropy in bits of the uniform distribution on k-sparse sign vectors.

    There are C(n,k)*2^k vectors in {-1,0,+1}^n with exactly k nonzeros, so the
    exact value is log2 of that count; it is always >= k*log2(n/k).
    """
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return math.log2(math.comb(n, k)) + k


def center_mod(x, period=1.0):
    """Reduce into the centered fundamental domain [-period/2, period/2)."""
    x = np.asarray(x, dtype=float)
    return x - period * np.floor(x / period + 0.5)


def wrap_mod(x, period=1.0):
    """Reduce into the canonical fundamental domain [0, period)."""
    x = np.asarray(x, dtype=float)
    return x - period * np.floor(x / period)


def gaussian_cdf(width: float):
    """cdf of the width-s Gaussian (variance s^2/(2*pi))."""
    s = float(width)

    def cdf(x):
        return 0.5 * (1.0 + special.erf(np.asarray(x, dtype=float) * math.sqrt(math.pi) / s))

    return cdf


def wrapped_gaussian_cdf(width: float, period: float = 1.0):
    """cdf on [-period/2, period/2) of a width-s Gaussian wrapped mod period."""
    s = float(width)
    p = float(period)
    terms = max(2, int(math.ceil(4.0 * s / p)) + 2)
    base = gaussian_cdf(s)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for j in range(-terms, terms + 1):
            total = total + base(x + j * p) - base(-p / 2.0 + j * p)
        return np.clip(total, 0.0, 1.0)

    return cdf


def ks_test(samples, cdf, threshold: float = 0.01, name: str = "ks") -> TestReport:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    Torus-valued data must be unwrapped to a centered fundamental domain by the
    caller before testing against an unwrapped (or wrapped-cdf) reference.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 20:
        raise ValueError(f"need at least 20 samples, got {n}")
    f = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(f) < -1e-12):
        raise ValueError("reference cdf is non-monotone on the sample grid")
    grid = np.arange(1, n + 1, dtype=float) / n
    d = max(np.max(grid - f), np.max(f - (grid - 1.0 / n)))
    p = special.kolmogorov(math.sqrt(n) * d)
    return _report(name, d, p, n, threshold)


def _bucket_count(q: int, n_samples: int) -> int:
    # largest divisor of q giving expected counts >= 5 per cell
    cap = n_samples // 5
    if cap < 2:
        raise ValueError(f"too few samples ({n_samples}) for any binning of modulus {q}")
    if q <= cap:
        return q
    best = 1
    d = 1
    while d * d <= q:
        if q % d == 0:
            if d <= cap:
                best = max(best, d)
            if q // d <= cap:
                best = max(best, q // d)
        d += 1
    if best < 2:
        raise ValueError(f"modulus {q} has no divisor compatible with {n_samples} samples")
    return best


def chi2_uniform_modq(samples, q: int, threshold: float = 0.01, name: str = "chi2-uniform") -> TestReport:
    """Pearson chi-square of integer residues against the uniform pmf on Z_q.

    When 5*q exceeds the sample count, residues are grouped into equal-width
    buckets (the largest divisor of q keeping expected counts >= 5).
    """
    x = np.asarray(samples).ravel()
    if x.size == 0:
        raise ValueError("empty input")
    r = np.mod(x.astype(np.int64), q)
    cells = _bucket_count(q, x.size)
    idx = r // (q // cells)
    counts = np.bincount(idx, minlength=cells)
    expected = x.size / cells
    stat = float(np.sum((counts - expected) ** 2) / expected)
    p = stats.chi2.sf(stat, cells - 1)
    return _report(name, stat, p, x.size, threshold)


def chi2_gof(samples, values, probs, threshold: float = 0.01, min_expected: float = 5.0,
             name: str = "chi2-gof") -> TestReport:
    """Chi-square goodness of fit of integer-valued samples to a finite pmf.

    `values` must be consecutive-ish sorted support points covering the sample
    range; cells are merged outward-in until every expected count reaches
    `min_expected`. Samples outside the support are clipped into the end cells.
    """
    x = np.asarray(samples, dtype=np.int64).ravel()
    values = np.asarray(values, dtype=np.int64)
    probs = np.asarray(probs, dtype=float)
    if values.size != probs.size:
        raise ValueError("values and probs length mismatch")
    probs = probs / probs.sum()
    n = x.size
    idx = np.clip(np.searchsorted(values, x), 0, values.size - 1)
    counts = np.bincount(idx, minlength=values.size).astype(float)
    expected = probs * n

    # merge low-expectation edge cells inward so the chi-square approximation holds
    edges = []
    lo, hi = 0, values.size - 1
    while hi - lo > 1 and expected[lo] < min_expected:
        expected[lo + 1] += expected[lo]
        counts[lo + 1] += counts[lo]
        lo += 1
    while hi - lo > 1 and expected[hi] < min_expected:
        expected[hi - 1] += expected[hi]
        counts[hi - 1] += counts[hi]
        hi -= 1
    counts = counts[lo:hi + 1]
    expected = expected[lo:hi + 1]
    keep = expected >= min_expected
    if keep.sum() < 2:
        raise ValueError("too few samples for the expected-count rule")
    # any interior low cells (possible for spiky pmfs) get pooled together
    pooled_c = counts[~keep].sum()
    pooled_e = expected[~keep].sum()
    counts = counts[keep]
    expected = expected[keep]
    if pooled_e > 0:
        counts = np.append(counts, pooled_c)
        expected = np.append(expected, pooled_e)
    stat = float(np.sum((counts - expected) ** 2 / expected))
    p = stats.chi2.sf(stat, counts.size - 1)
    return _report(name, stat, p, n, threshold)


def tv_estimate(samples_a, samples_b, bins=100) -> float:
    """Binned total-variation estimate: half the L1 distance of two histograms.

    `bins` is either a per-axis bin count or an explicit edge specification
    accepted by numpy's histogramdd; the binning covers both supports.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    dim = a.shape[1]
    if isinstance(bins, int):
        lo = np.minimum(a.min(axis=0), b.min(axis=0))
        hi = np.maximum(a.max(axis=0), b.max(axis=0))
        hi = np.where(hi > lo, hi, lo + 1.0)
        edges = [np.linspace(lo[i], hi[i], bins + 1) for i in range(dim)]
    else:
        edges = bins
    ha, _ = np.histogramdd(a, bins=edges)
    hb, _ = np.histogramdd(b, bins=edges)
    pa = ha / a.shape[0]
    pb = hb / b.shape[0]
    return float(0.5 * np.abs(pa - pb).sum())


def discrete_gaussian_support(sigma: float, center: float = 0.0, tail: float = 12.0):
    """Integer offsets j such that center+j covers all but ~rho(12 sigma) mass."""
    radius = max(1, int(math.ceil(tail * sigma)))
    j = np.arange(-radius, radius + 1, dtype=np.int64)
    return j


def discrete_gaussian_pmf(sigma: float, points) -> np.ndarray:
    """Normalized pmf proportional to exp(-pi x^2 / sigma^2) on the given points."""
    x = np.asarray(points, dtype=float)
    w = np.exp(-math.pi * (x / sigma) ** 2)
    total = w.sum()
    if total <= 0:
        raise ValueError("all pmf weights underflowed to zero")
    return w / total


def fold_pmf_modq(values, probs, q: int):
    """Fold an integer pmf onto centered residues mod q.

    Returns (residues in [-q/2, q/2), probs) sorted by residue.
    """
    values = np.asarray(values, dtype=np.int64)
    probs = np.asarray(probs, dtype=float)
    res = ((values + q // 2) % q) - q // 2
    folded = {}
    for r, p in zip(res.tolist(), probs.tolist()):
        folded[r] = folded.get(r, 0.0) + p
    keys = np.array(sorted(folded), dtype=np.int64)
    return keys, np.array([folded[k] for k in keys.tolist()])
