"""Generators and density evaluators for the named distributions: LWE (in its
discrete, continuous-sample and Gaussian-sample regimes), CLWE, truncated
hCLWE, and their null counterparts.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import wrap_mod
from .samplers import (
    SecretVector,
    _gen,
    sample_continuous_gaussian,
    sample_discrete_gaussian,
    sample_uniform_modq,
    sample_uniform_torus,
)

__all__ = [
    "LweParams",
    "ClweParams",
    "MixtureSpec",
    "LweBatch",
    "ClweBatch",
    "gen_lwe",
    "gen_clwe",
    "gen_null",
    "gen_trunc_hclwe",
    "hclwe_density",
    "mixture_density",
]

# relative cutoff for truncating sums over the integers in density evaluations;
# double-precision floor with safety margin
SUM_CUTOFF = 1e-30


@dataclass
class LweParams:
    n: int
    m: int
    q: int
    sigma: float
    secret_dist: str = "sparse"
    error_regime: str = "discrete"    # discrete | continuous
    sample_regime: str = "discrete"   # discrete | continuous | gaussian

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.sample_regime == "discrete" and self.q < 2:
            raise ValueError("discrete sample regime needs q >= 2")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.error_regime not in ("discrete", "continuous"):
            raise ValueError(f"unknown error regime {self.error_regime!r}")
        if self.sample_regime not in ("discrete", "continuous", "gaussian"):
            raise ValueError(f"unknown sample regime {self.sample_regime!r}")


@dataclass
class ClweParams:
    n: int
    m: int
    gamma: float
    beta: float
    secret_dist: str = "unit"

    def __post_init__(self):
        if self.gamma < 0 or self.beta <= 0:
            raise ValueError("need gamma >= 0 and beta > 0")


@dataclass
class LweBatch:
    """m samples (a_i, b_i) with regime tags; a is (m, n), b is (m,).

    a_domain: "zq" (integer residues), "tq" (reals in [0,q)) or "gauss".
    b_domain: "zq" (integer residues) or "tq" (reals in [0,q)).
    """

    a: np.ndarray
    b: np.ndarray
    q: float
    a_domain: str
    b_domain: str

    def __post_init__(self):
        if self.a.shape[0] != self.b.shape[0]:
            raise ValueError("a and b row counts differ")
        if self.b_domain == "zq" and not np.issubdtype(self.b.dtype, np.integer):
            raise ValueError("b tagged zq must be integer-valued")
        if self.a_domain == "zq" and not np.issubdtype(self.a.dtype, np.integer):
            raise ValueError("a tagged zq must be integer-valued")

    @property
    def m(self):
        return self.a.shape[0]

    @property
    def n(self):
        return self.a.shape[1]


@dataclass
class ClweBatch:
    """m CLWE samples: Gaussian a (m, n) and b in [0, 1)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.shape[0] != self.b.shape[0]:
            raise ValueError("a and b row counts differ")
        if self.b.size and (self.b.min() < 0.0 or self.b.max() >= 1.0):
            raise ValueError("b must lie in [0, 1)")

    @property
    def m(self):
        return self.a.shape[0]

    @property
    def n(self):
        return self.a.shape[1]


@dataclass
class MixtureSpec:
    """Truncated hCLWE mixture: equally spaced Gaussian pancakes along a secret
    direction, width 1 in all orthogonal directions.

    weights[j] is proportional to rho_{sqrt(beta^2+gamma^2)}(indices[j]); the
    component mean along the secret is gamma*indices[j]/(beta^2+gamma^2) and the
    along-secret width is beta/sqrt(beta^2+gamma^2).
    """

    direction: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    means_along: np.ndarray
    width_along: float
    gamma: float
    beta: float
    width_orth: float = 1.0

    def __post_init__(self):
        self.direction = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(self.direction) - 1.0) > 1e-9:
            raise ValueError("mixture direction must be a unit vector")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be normalized")
        if not (0 < self.width_along < 1):
            raise ValueError("along-secret width must lie in (0, 1)")

    @property
    def n(self):
        return self.direction.shape[0]

    @property
    def g(self):
        return self.indices.shape[0]


def _secret_for_regime(params: LweParams, secret: SecretVector):
    if params.sample_regime == "discrete" and not secret.is_integer_coset():
        raise ValueError("discrete sample regime requires an integer secret")
    return secret.vector()


def gen_lwe(params: LweParams, secret: SecretVector, count=None, rng=None) -> LweBatch:
    """LWE samples (a_i, <a_i, s> + e_i mod q) in the requested regimes."""
    m = params.m if count is None else int(count)
    n, q = params.n, params.q
    if secret.n != n:
        raise ValueError(f"secret dimension {secret.n} does not match n={n}")
    s = _secret_for_regime(params, secret)

    if params.sample_regime == "discrete":
        a = sample_uniform_modq(q, n, rng, m)
    elif params.sample_regime == "continuous":
        a = sample_uniform_torus(q, n, rng, m)
    else:
        a = sample_continuous_gaussian(1.0, n, rng, m)

    if params.error_regime == "discrete":
        e = sample_discrete_gaussian(params.sigma, 0.0, rng, m)
        e = np.round(e).astype(np.int64)
    else:
        e = sample_continuous_gaussian(params.sigma, 1, rng, m)[:, 0]

    if params.sample_regime == "discrete" and params.error_regime == "discrete":
        if not secret.is_integer_coset() or secret.scale != 1.0:
            raise ValueError("fully discrete regime requires an unscaled integer secret")
        b = np.mod(a @ secret.entries + e, q)
        return LweBatch(a, b, q, "zq", "zq")

    b = wrap_mod(a @ s + e, q)
    a_domain = {"discrete": "zq", "continuous": "tq", "gaussian": "gauss"}[params.sample_regime]
    return LweBatch(a, b, q, a_domain, "tq")


def gen_clwe(params: ClweParams, secret: SecretVector, count=None, rng=None) -> ClweBatch:
    """CLWE samples: a ~ width-1 Gaussian, b = gamma*<a,w> + e mod 1, e of width beta."""
    m = params.m if count is None else int(count)
    n = params.n
    w = secret.vector()
    if w.shape[0] != n:
        raise ValueError(f"secret dimension {w.shape[0]} does not match n={n}")
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise ValueError("CLWE secret must be a unit vector within 1e-9")
    a = sample_continuous_gaussian(1.0, n, rng, m)
    e = sample_continuous_gaussian(params.beta, 1, rng, m)[:, 0]
    b = wrap_mod(params.gamma * (a @ w) + e, 1.0)
    return ClweBatch(a, b)


def gen_null(regime: str, n: int, m: int, rng, q: int = None):
    """Null counterparts: a per regime, b uniform on the matching domain.

    regime is one of "lwe-discrete", "lwe-continuous", "clwe".
    """
    if regime == "lwe-discrete":
        if q is None:
            raise ValueError("q required for LWE nulls")
        a = sample_uniform_modq(q, n, rng, m)
        b = sample_uniform_modq(q, 1, rng, m)[:, 0]
        return LweBatch(a, b, q, "zq", "zq")
    if regime == "lwe-continuous":
        if q is None:
            raise ValueError("q required for LWE nulls")
        a = sample_uniform_torus(q, n, rng, m)
        b = sample_uniform_torus(q, 1, rng, m)[:, 0]
        return LweBatch(a, b, q, "tq", "tq")
    if regime == "clwe":
        a = sample_continuous_gaussian(1.0, n, rng, m)
        b = sample_uniform_torus(1.0, 1, rng, m)[:, 0]
        return ClweBatch(a, b)
    raise ValueError(f"unknown null regime {regime!r}")


def gen_trunc_hclwe(spec: MixtureSpec, count: int, rng) -> np.ndarray:
    """Draw vectors from a truncated hCLWE Gaussian mixture.

    Per draw: pick component j by weight, emit x_perp + (mu_j + w*xi)*s with
    x_perp a width-1 Gaussian in the orthogonal complement of s and xi a
    width-1 scalar Gaussian scaled to the along-secret width.
    """
    g = _gen(rng)
    m = int(count)
    n = spec.n
    comp = g.choice(spec.g, size=m, p=spec.weights)
    x = sample_continuous_gaussian(spec.width_orth, n, rng, m)
    t_perp = x @ spec.direction
    x -= t_perp[:, None] * spec.direction[None, :]
    xi = sample_continuous_gaussian(spec.width_along, 1, rng, m)[:, 0]
    t = spec.means_along[comp] + xi
    return x + t[:, None] * spec.direction[None, :]


def _int_range_for(width: float, center: float):
    # integers within a relative-SUM_CUTOFF window of the peak of rho_width(j - center)
    radius = width * math.sqrt(-math.log(SUM_CUTOFF) / math.pi) + 1.0
    lo = int(math.floor(center - radius))
    hi = int(math.ceil(center + radius))
    return np.arange(lo, hi + 1, dtype=float)


def hclwe_density(x, spec: MixtureSpec):
    """Both sides of the hCLWE mixture identity at point x (unnormalized).

    Left: rho(x) * sum_j rho_beta(j - gamma*<s,x>).
    Right: sum_j rho_{gp}(j) * rho(P_perp x) * rho_{beta/gp}(<s,x> - gamma*j/gp^2),
    with gp = sqrt(beta^2 + gamma^2). Sums over the integers are truncated once
    terms fall below a relative 1e-30 cutoff.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ValueError(f"point dimension {x.shape} does not match n={spec.n}")
    gamma, beta = spec.gamma, spec.beta
    gp2 = beta * beta + gamma * gamma
    gp = math.sqrt(gp2)
    t = float(x @ spec.direction)
    rho_x = math.exp(-math.pi * float(x @ x))

    # both sums run over the same window: terms on either side share the index
    # and are negligible once rho_beta(j - gamma*t) falls below the cutoff
    j = _int_range_for(beta, gamma * t)
    lhs = rho_x * np.exp(-math.pi * ((j - gamma * t) / beta) ** 2).sum()

    perp2 = float(x @ x) - t * t
    rho_perp = math.exp(-math.pi * max(perp2, 0.0))
    along = np.exp(-math.pi * ((t - gamma * j / gp2) / (beta / gp)) ** 2)
    comp = np.exp(-math.pi * (j / gp) ** 2)
    rhs = rho_perp * float((comp * along).sum())
    return float(lhs), float(rhs)


def mixture_density(x, spec: MixtureSpec) -> float:
    """Normalized density of the truncated mixture at point x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ValueError(f"point dimension {x.shape} does not match n={spec.n}")
    t = float(x @ spec.direction)
    perp2 = max(float(x @ x) - t * t, 0.0)
    w = spec.width_along
    orth = math.exp(-math.pi * perp2) / (spec.width_orth ** (spec.n - 1))
    along = np.exp(-math.pi * ((t - spec.means_along) / w) ** 2) / w
    return float(orth * (spec.weights * along).sum())
