"""Randomness sources: continuous and (coset) discrete Gaussians, uniform
modular/torus draws, sparse and fixed-norm secrets, Haar-random rotations.

All samplers are driven by an RngStream (counter-based Philox generator keyed
by seed and stream id), so parallel trials stay reproducible: equal seeds give
bitwise-equal outputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import GaussianParam

__all__ = [
    "RngStream",
    "SecretVector",
    "SAMPLER_STATS",
    "sample_continuous_gaussian",
    "sample_discrete_gaussian",
    "sample_uniform_modq",
    "sample_uniform_torus",
    "sample_sparse_secret",
    "sample_fixed_norm_secret",
    "sample_unit_secret",
    "sample_rotation",
]

_MASK64 = (1 << 64) - 1

# counters for rare-but-legal sampler conditions (e.g. single-point truncated support)
SAMPLER_STATS = {"single_point_support": 0}


def _mix64(x: int) -> int:
    # splitmix64 finalizer, used to derive child stream ids
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class RngStream:
    """Reproducible random stream: Philox keyed by (seed, stream id).

    The 128-bit Philox key is seed | stream << 64, so distinct (seed, stream)
    pairs are independent streams and the internal counter tracks position.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        self.gen = np.random.Generator(np.random.Philox(key=self.seed | (self.stream << 64)))

    def child(self, index: int) -> "RngStream":
        """Derived stream for parallel trial `index`; same seed, mixed stream id."""
        return RngStream(self.seed, _mix64(self.stream ^ ((int(index) + 1) & _MASK64)))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


@dataclass
class SecretVector:
    """A secret with its domain tag.

    Integer-backed domains ("fixed-norm", "sparse", and their "scaled-*"
    variants) keep exact integer entries plus a real scale factor, so that
    reductions which rescale the secret stay exactly invertible. The
    "unit" domain stores real entries directly.
    """

    entries: np.ndarray
    domain: str  # fixed-norm | sparse | scaled-fixed-norm | scaled-sparse | unit
    scale: float = 1.0
    k: int = 0  # nonzero count for sparse domains

    def __post_init__(self):
        if self.domain == "unit":
            self.entries = np.asarray(self.entries, dtype=float)
            if abs(np.linalg.norm(self.entries) - 1.0) > 1e-9:
                raise ValueError("unit-domain secret must have norm 1 within 1e-9")
        else:
            self.entries = np.asarray(self.entries, dtype=np.int64)
        if self.domain in ("sparse", "scaled-sparse"):
            nz = np.count_nonzero(self.entries)
            if self.k == 0:
                self.k = int(nz)
            if nz != self.k or not np.all(np.isin(self.entries[self.entries != 0], (-1, 1))):
                raise ValueError(f"sparse secret must have exactly k={self.k} entries in {{-1,+1}}")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries)) * self.scale

    def vector(self) -> np.ndarray:
        """The secret as a real vector (entries times scale)."""
        return self.entries.astype(float) * self.scale

    def is_integer_coset(self) -> bool:
        return self.domain != "unit"

    def scaled(self, factor: float, domain: str) -> "SecretVector":
        return SecretVector(self.entries.copy(), domain, self.scale * factor, self.k)

    def as_dict(self):
        return {
            "entries": self.entries.tolist(),
            "domain": self.domain,
            "scale": self.scale,
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["entries"]), d["domain"], float(d["scale"]), int(d.get("k", 0)))


def sample_continuous_gaussian(param, n: int, rng, size=None):
    """i.i.d. coordinates with mean center and per-coordinate variance s^2/(2*pi).

    `param` is a GaussianParam or a bare width. Returns shape (n,) or (size, n).
    """
    if isinstance(param, GaussianParam):
        width = param.width
        center = param.center
        if center.shape[0] not in (1, n):
            raise ValueError("center dimension does not match n")
    else:
        width = float(param)
        center = np.zeros(1)
        if width <= 0:
            raise ValueError("width must be positive")
    g = _gen(rng)
    shape = (n,) if size is None else (size, n)
    x = g.standard_normal(shape) * (width / math.sqrt(2.0 * math.pi))
    return x + center


def _coset_table(sigma: float, coset_frac: np.ndarray):
    # support points coset_frac + j for |j| <= ceil(12 sigma); coset_frac in [-1/2, 1/2]
    radius = max(1, int(math.ceil(12.0 * sigma)))
    j = np.arange(-radius, radius + 1, dtype=float)
    pts = coset_frac[..., None] + j
    w = np.exp(-math.pi * (pts / sigma) ** 2)
    return pts, w


def sample_discrete_gaussian(sigma: float, coset=0.0, rng=None, size=None):
    """Draw from the discrete Gaussian on Z + coset with width sigma.

    Probabilities are exactly proportional to exp(-pi x^2/sigma^2) on the
    support truncated at 12*sigma around the origin (tail mass < 2^-200);
    sampling is by inversion over the precomputed table. `coset` may be a
    scalar or an array broadcast against `size`. A width so small that only a
    single support point carries weight is legal but counted in SAMPLER_STATS.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    g = _gen(rng)
    c = np.asarray(coset, dtype=float)
    scalar = size is None and c.ndim == 0
    m = 1 if size is None else int(size)
    c = np.broadcast_to(c, (m,)).astype(float) if c.ndim == 0 else c.astype(float)
    if c.shape[0] != m:
        raise ValueError("coset array length must match size")
    c_frac = c - np.round(c)
    out = np.empty(m, dtype=float)
    chunk = max(1, int(4e6 / (24 * sigma + 2)))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        pts, w = _coset_table(sigma, c_frac[lo:hi])
        nonzero = np.count_nonzero(w, axis=1)
        SAMPLER_STATS["single_point_support"] += int(np.sum(nonzero <= 1))
        cdf = np.cumsum(w, axis=1)
        u = g.random(hi - lo) * cdf[:, -1]
        idx = np.sum(cdf < u[:, None], axis=1)
        out[lo:hi] = pts[np.arange(hi - lo), idx]
    return float(out[0]) if scalar else out


def sample_uniform_modq(q: int, n: int, rng, m=None):
    """Uniform residue vector(s) over Z_q; shape (n,) or (m, n)."""
    if q < 2:
        raise ValueError("q must be at least 2")
    g = _gen(rng)
    shape = (n,) if m is None else (m, n)
    return g.integers(0, q, size=shape, dtype=np.int64)


def sample_uniform_torus(q: float, n: int, rng, m=None):
    """Uniform real vector(s) on [0, q)^n."""
    if q <= 0:
        raise ValueError("q must be positive")
    g = _gen(rng)
    shape = (n,) if m is None else (m, n)
    return g.random(shape) * q


def sample_sparse_secret(n: int, k: int, rng) -> SecretVector:
    """Uniform over vectors in {-1,0,+1}^n with exactly k nonzero entries."""
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    g = _gen(rng)
    support = g.choice(n, size=k, replace=False)
    signs = g.integers(0, 2, size=k) * 2 - 1
    entries = np.zeros(n, dtype=np.int64)
    entries[support] = signs
    return SecretVector(entries, "sparse", 1.0, k)


def sample_fixed_norm_secret(n: int, k: int, rng) -> SecretVector:
    """Integer secret of exact norm sqrt(k): a k-sparse sign vector tagged fixed-norm."""
    s = sample_sparse_secret(n, k, rng)
    return SecretVector(s.entries, "fixed-norm", 1.0, k)


def sample_rotation(n: int, rng) -> np.ndarray:
    """Haar-random orthogonal matrix.

    QR of an i.i.d. Gaussian matrix with the triangular factor's diagonal signs
    pushed into Q, which makes the factorization unique and the result Haar.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g = _gen(rng)
    a = g.standard_normal((n, n))
    Q, R = np.linalg.qr(a)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def sample_unit_secret(n: int, rng) -> SecretVector:
    """Uniform unit vector, realized as a Haar rotation applied to e_1."""
    w = sample_rotation(n, rng)[:, 0].copy()
    return SecretVector(w, "unit")
