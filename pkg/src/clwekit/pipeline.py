"""The fixed-norm-LWE to CLWE pipeline and the reverse CLWE to LWE maps.

Forward, a discrete LWE batch (a in Z_q^n, b in Z_q, secret of exact norm r,
discrete noise of width sigma) is turned into a CLWE batch in four steps:

  1. smooth the errors continuous:       b += D_{sqrt(4 ln m + c)}
  2. smooth the samples onto the torus:  a += D_{3 sqrt(ln n + ln m + c)}^n
  3. Gaussianize via coset preimages:    a_i -> y_i ~ D_{Z + a_i/q, tau},
                                         emit (y/tau, b/q)
  4. rotate by one Haar matrix:          a -> R a, secret -> R w

Every hidden asymptotic slack is replaced by the explicit constant c_slack
inside the square roots. Steps are per-sample maps after the one-time plan,
and each enforces its input regime tags so mis-composition fails loudly.

The reverse direction undoes steps 3 and 2 for integer-coset secrets:
reverse_scale sends (a, b) to (a*tau*q mod q, b*q mod q) and reverse_discretize
rounds the samples back onto Z_q^n with a coset Gaussian.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import ClweBatch, LweBatch
from .numerics import wrap_mod
from .samplers import (
    SecretVector,
    sample_continuous_gaussian,
    sample_discrete_gaussian,
    sample_rotation,
)

__all__ = [
    "PipelinePlan",
    "PlanError",
    "plan",
    "step1_errors",
    "step2_samples",
    "step3_gaussianize",
    "step4_rotate",
    "run_pipeline",
    "reverse_scale",
    "reverse_discretize",
]


class PlanError(ValueError):
    """A pipeline hypothesis fails; the message names the failing inequality."""


@dataclass
class PipelinePlan:
    n: int
    m: int
    q: int
    r: float
    sigma: float
    c_slack: float
    # derived widths
    sigma_step1: float   # width of the smoothing noise added to b
    sigma_step2: float   # per-coordinate width of the smoothing noise added to a
    sigma2: float        # planted error width after step 1
    sigma3: float        # planted error width after step 2
    tau: float           # preimage width of step 3
    gamma: float         # r * tau
    beta: float          # sigma3 / q

    def as_dict(self):
        return {k: getattr(self, k) for k in (
            "n", "m", "q", "r", "sigma", "c_slack", "sigma_step1", "sigma_step2",
            "sigma2", "sigma3", "tau", "gamma", "beta")}


def plan(n: int, m: int, q: int, r: float, sigma: float, c_slack: float = 4.0) -> PipelinePlan:
    """Derive all pipeline constants and check the step hypotheses.

    Step 1 needs sigma > sqrt(4 ln m + c_slack); step 2 needs the post-step-1
    width sigma2 to be at least 3 r sqrt(ln n + ln m + c_slack). Violations
    raise PlanError naming the inequality.
    """
    if min(n, m, q) < 1 or r <= 0 or sigma <= 0 or c_slack < 0:
        raise PlanError("parameters must be positive")
    log_nm = math.log(n) + math.log(m) + c_slack
    tau = math.sqrt(log_nm)
    s_step1 = math.sqrt(4.0 * math.log(m) + c_slack)
    if sigma <= s_step1:
        raise PlanError(
            f"hypothesis violated: sigma = {sigma:.6g} must exceed "
            f"sqrt(4 ln m + c_slack) = {s_step1:.6g}")
    sigma2 = math.sqrt(sigma ** 2 + s_step1 ** 2)
    s_step2 = 3.0 * tau
    if sigma2 < r * s_step2:
        raise PlanError(
            f"hypothesis violated: sigma2 = {sigma2:.6g} must be at least "
            f"3 r sqrt(ln n + ln m + c_slack) = {r * s_step2:.6g}")
    sigma3 = math.sqrt(sigma2 ** 2 + (r * s_step2) ** 2)
    return PipelinePlan(
        n=n, m=m, q=q, r=r, sigma=sigma, c_slack=c_slack,
        sigma_step1=s_step1, sigma_step2=s_step2,
        sigma2=sigma2, sigma3=sigma3, tau=tau, gamma=r * tau, beta=sigma3 / q,
    )


def _require(batch, a_domain, b_domain, step):
    if batch.a_domain != a_domain or batch.b_domain != b_domain:
        raise ValueError(
            f"{step}: expected regimes a={a_domain}, b={b_domain}; "
            f"got a={batch.a_domain}, b={batch.b_domain}")


def step1_errors(batch: LweBatch, p: PipelinePlan, rng) -> LweBatch:
    """Discrete to continuous errors: b += e', e' ~ D_{sigma_step1}, mod q."""
    _require(batch, "zq", "zq", "step1")
    e = sample_continuous_gaussian(p.sigma_step1, 1, rng, batch.m)[:, 0]
    b = wrap_mod(batch.b + e, p.q)
    return LweBatch(batch.a, b, p.q, "zq", "tq")


def step2_samples(batch: LweBatch, p: PipelinePlan, rng) -> LweBatch:
    """Discrete to continuous samples: a += g, g ~ D_{sigma_step2}^n, mod q."""
    _require(batch, "zq", "tq", "step2")
    g = sample_continuous_gaussian(p.sigma_step2, batch.n, rng, batch.m)
    a = wrap_mod(batch.a + g, p.q)
    return LweBatch(a, batch.b, p.q, "tq", "tq")


def step3_gaussianize(batch: LweBatch, p: PipelinePlan, rng,
                      secret: SecretVector = None):
    """Uniform to Gaussian samples via coset preimages.

    Each coordinate z = a_i/q gets a preimage y ~ D_{Z+z, tau}, so tau*(y/tau)
    is congruent to z mod 1 exactly, and over uniform z the marginal of y is a
    width-tau Gaussian. Output is (y/tau, b/q); a planted integer secret s of
    norm r becomes s/r with frequency gamma = r*tau and noise width beta.
    """
    _require(batch, "tq", "tq", "step3")
    z = (batch.a / p.q).ravel()
    y = sample_discrete_gaussian(p.tau, z, rng, size=z.size).reshape(batch.a.shape)
    out = ClweBatch(y / p.tau, wrap_mod(batch.b / p.q, 1.0))
    if secret is None:
        return out, None
    if not secret.is_integer_coset():
        raise ValueError("step 3 bookkeeping needs an integer-coset secret")
    return out, secret.scaled(1.0 / p.r, "scaled-" + secret.domain)


def step4_rotate(batch: ClweBatch, rng, secret: SecretVector = None):
    """Randomize the secret direction: one Haar rotation applied to all samples.

    Inner products are preserved, so b needs no adjustment; a null batch maps
    to a null batch by spherical symmetry.
    """
    R = sample_rotation(batch.n, rng)
    out = ClweBatch(batch.a @ R.T, batch.b)
    if secret is None:
        return out, None
    w = R @ secret.vector()
    w /= np.linalg.norm(w)
    return out, SecretVector(w, "unit")


def run_pipeline(batch: LweBatch, p: PipelinePlan, rng, secret: SecretVector = None):
    """Compose steps 1-4. Sample count and dimension are preserved.

    Returns (ClweBatch, rotated unit secret or None).
    """
    b1 = step1_errors(batch, p, rng)
    b2 = step2_samples(b1, p, rng)
    b3, s3 = step3_gaussianize(b2, p, rng, secret)
    return step4_rotate(b3, rng, s3)


def reverse_scale(batch: ClweBatch, q: int, tau: float, secret: SecretVector = None):
    """CLWE back to continuous-sample LWE: (a*tau*q mod q, b*q mod q).

    For a planted integer-coset secret s/r with gamma = r*tau, the relation
    becomes <r*s', a'> + e' mod q with integer secret r*s' recovered exactly
    and noise width beta*q. Secrets without integer-coset structure are
    rejected: the reverse direction is defined for discrete secrets only.
    """
    a = wrap_mod(batch.a * (tau * q), q)
    b = wrap_mod(batch.b * q, q)
    out = LweBatch(a, b, q, "tq", "tq")
    if secret is None:
        return out, None
    if not secret.is_integer_coset() or not secret.domain.startswith("scaled-"):
        raise ValueError("reverse reduction requires a scaled integer-coset secret")
    return out, SecretVector(secret.entries.copy(), secret.domain.removeprefix("scaled-"),
                             1.0, secret.k)


def reverse_discretize(batch: LweBatch, tau: float, rng) -> LweBatch:
    """Continuous samples back onto Z_q^n with a coset Gaussian.

    Per coordinate, a' ~ D_{Z^n - a, tau} so a + a' is an integer; the sum mod
    q is exactly uniform over Z_q^n, and a planted error grows in width to
    sqrt(sigma^2 + r^2 tau^2).
    """
    _require(batch, "tq", "tq", "reverse_discretize")
    cosets = (-batch.a).ravel()
    shift = sample_discrete_gaussian(tau, cosets, rng, size=cosets.size).reshape(batch.a.shape)
    a = batch.a + shift
    rounded = np.round(a)
    if np.abs(a - rounded).max() > 1e-9:
        raise AssertionError("coset preimage failed to land on the integers")
    a_int = np.mod(rounded.astype(np.int64), int(batch.q))
    return LweBatch(a_int, batch.b, batch.q, "zq", "tq")
