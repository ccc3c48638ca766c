"""Gaussian-mixture surface: rejection from CLWE onto the zero fiber, mixture
packaging with the component-count formula, the brute-force sparse-direction
solver, and parameter presets for hard-instance experiments.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .distributions import ClweBatch, MixtureSpec
from .numerics import center_mod
from .samplers import SecretVector, _gen
from .sparse import AsymptoticHypothesisWarning, enumerate_sparse_vectors

__all__ = [
    "SolverParams",
    "clwe_to_hclwe",
    "g_for",
    "package_gmm",
    "solve_sparse_hclwe",
    "gmm_experiment_params",
]


@dataclass
class SolverParams:
    """Derived constants of the brute-force sparse-direction solver.

    m is the required sample count 5 k log2(n) / log2(1/(beta sqrt(k))),
    rounded up and optionally stretched by m_multiplier; the acceptance window
    is +-a*beta/gamma' with a = sqrt(ln(1/delta)), delta = 1/(100 m); the
    folding modulus is gamma / (ceil(sqrt(k)) * gamma'^2).
    """

    n: int
    k: int
    gamma: float
    beta: float
    m_multiplier: float = 1.0
    gamma_prime: float = field(init=False)
    modulus_f: float = field(init=False)
    m: int = field(init=False)
    delta: float = field(init=False)
    a_thresh: float = field(init=False)

    def __post_init__(self):
        if not (1 <= self.k <= self.n):
            raise ValueError("need 1 <= k <= n")
        if self.beta * math.sqrt(self.k) >= 1.0:
            raise ValueError("need beta*sqrt(k) < 1")
        self.gamma_prime = math.sqrt(self.gamma ** 2 + self.beta ** 2)
        self.modulus_f = self.gamma / (math.ceil(math.sqrt(self.k)) * self.gamma_prime ** 2)
        base = 5.0 * self.k * math.log2(self.n) / math.log2(1.0 / (self.beta * math.sqrt(self.k)))
        self.m = int(math.ceil(base * self.m_multiplier))
        self.delta = 1.0 / (100.0 * self.m)
        self.a_thresh = math.sqrt(math.log(1.0 / self.delta))
        need = 2.0 * math.sqrt(self.k * (math.log(self.n) + math.log(self.m)))
        if self.gamma < need - 1e-9:
            raise ValueError(
                f"gamma = {self.gamma:.6g} below the solver hypothesis "
                f"2*sqrt(k*(ln n + ln m)) = {need:.6g}")


def clwe_to_hclwe(batch: ClweBatch, delta_r: float, rng):
    """Rejection-map CLWE samples onto the zero fiber.

    A sample (a, b) is kept with probability exp(-pi * bc^2 / delta_r^2) where
    bc is b in the centered domain [-1/2, 1/2); each decision uses exactly one
    uniform draw. The accepted a-stream follows the pancake mixture with noise
    width sqrt(beta^2 + delta_r^2), and a null input stream stays a width-1
    Gaussian. Returns (accepted vectors, info dict with the acceptance rate).
    """
    if not (0.0 < delta_r < 0.25):
        raise ValueError(f"delta_r must lie in (0, 1/4), got {delta_r}")
    g = _gen(rng)
    bc = center_mod(batch.b, 1.0)
    p_accept = np.exp(-math.pi * (bc / delta_r) ** 2)
    keep = g.random(batch.m) <= p_accept
    info = {
        "n_in": int(batch.m),
        "n_accepted": int(keep.sum()),
        "acceptance_rate": float(keep.mean()) if batch.m else 0.0,
        "delta_r": float(delta_r),
    }
    return batch.a[keep].copy(), info


def g_for(gamma: float, m: int) -> int:
    """Component count carried by the packaged mixture: ceil(4*gamma*sqrt(ln m / pi)) + 1."""
    if m < 2:
        raise ValueError("need m >= 2")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return int(math.ceil(4.0 * gamma * math.sqrt(math.log(m) / math.pi))) + 1


def package_gmm(secret: SecretVector, gamma: float, beta: float, g: int) -> MixtureSpec:
    """Assemble the truncated pancake mixture for a unit secret direction.

    Component indices run over [-floor(g/2), floor((g-1)/2)]; weights are
    proportional to rho_{sqrt(beta^2+gamma^2)} at the index, means along the
    secret are gamma*index/(beta^2+gamma^2), the along-secret width is
    beta/sqrt(beta^2+gamma^2) and all orthogonal directions have width 1.
    """
    if g < 1:
        raise ValueError("need g >= 1")
    direction = secret.vector()
    nrm = np.linalg.norm(direction)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError("mixture secret must be a unit vector within 1e-9")
    direction = direction / nrm
    gp2 = beta * beta + gamma * gamma
    idx = np.arange(-(g // 2), (g - 1) // 2 + 1, dtype=np.int64)
    w = np.exp(-math.pi * idx.astype(float) ** 2 / gp2)
    return MixtureSpec(
        direction=direction,
        indices=idx,
        weights=w / w.sum(),
        means_along=gamma * idx.astype(float) / gp2,
        width_along=beta / math.sqrt(gp2),
        gamma=gamma,
        beta=beta,
    )


def solve_sparse_hclwe(samples, p: SolverParams):
    """Brute-force search for a planted sparse direction in pancake samples.

    Enumerates candidate directions s over the scaled sparse sign vectors in
    support-then-sign order, folds <a_i, s> into the centered window of width
    modulus_f, and returns the first candidate whose folded values stay within
    +-a*beta/gamma' on all m samples. Returns (SecretVector or None, info);
    info carries the ambiguity flag and per-candidate pass counts for
    candidates clearing at least half the samples.
    """
    a = np.asarray(samples, dtype=float)
    if a.ndim != 2 or a.shape[1] != p.n:
        raise ValueError(f"samples must be (N, {p.n})")
    if a.shape[0] < p.m:
        raise ValueError(f"need at least m = {p.m} samples, got {a.shape[0]}")
    if p.m < 1:
        raise ValueError("solver needs at least one sample")
    a = a[: p.m]
    cand = enumerate_sparse_vectors(p.n, p.k)
    scale = 1.0 / math.sqrt(p.k)
    window = p.a_thresh * p.beta / p.gamma_prime
    f = center_mod(cand @ a.T * scale, p.modulus_f)
    ok = np.abs(f) <= window
    counts = ok.sum(axis=1)
    hits = np.flatnonzero(counts == p.m)
    half = np.flatnonzero(counts >= math.ceil(p.m / 2))
    # a direction and its negation fold to mirrored values, so a planted
    # secret always passes together with its sign flip; the flag records that
    info = {
        "ambiguous": bool(hits.size > 1),
        "n_candidates": int(cand.shape[0]),
        "full_pass": [cand[i].tolist() for i in hits],
        "pass_counts": [
            {"index": int(i), "entries": cand[i].tolist(), "count": int(counts[i])}
            for i in half
        ],
    }
    if hits.size == 0:
        return None, info
    first = int(hits[0])
    return SecretVector(cand[first], "scaled-sparse", scale, p.k), info


def gmm_experiment_params(preset: str, ell: int, alpha: float = 2.0, delta: float = 0.5,
                          c_slack: float = 4.0) -> dict:
    """Parameter bundles for the hard-instance corollaries, for scripting.

    preset "poly": n = ell^alpha, k = 4*ell/(alpha-1); preset "subexp":
    n = 2^(ell^delta), k = 4*ell^(1-delta)*log2(ell). Both use q = ell^2 and
    sigma = sqrt(ell). The bundle adds a sample budget m = max(ell, n), the
    induced (gamma, beta) of the sparse route and the component count g.
    Infeasible desk-scale combinations (k >= n, or beta*sqrt(k) >= 1) are
    returned with warnings rather than rejected.
    """
    if ell < 2:
        raise ValueError("need ell >= 2")
    if preset == "poly":
        if alpha <= 1:
            raise ValueError("poly preset needs alpha > 1")
        n = round(ell ** alpha)
        k = round(4.0 * ell / (alpha - 1.0))
    elif preset == "subexp":
        if not (0 < delta < 1):
            raise ValueError("subexp preset needs delta in (0,1)")
        n = round(2.0 ** (ell ** delta))
        k = round(4.0 * ell ** (1.0 - delta) * math.log2(ell))
    else:
        raise ValueError(f"unknown preset {preset!r}; choose 'poly' or 'subexp'")
    q = ell ** 2
    sigma = math.sqrt(ell)
    m = max(ell, n)
    gamma = math.sqrt(k) * math.sqrt(math.log(m) + math.log(n) + c_slack)
    beta = 2.0 * sigma * math.sqrt(k + 1.0) / q
    notes = []
    if k >= n:
        notes.append(f"infeasible at this scale: k = {k} >= n = {n}")
    if beta * math.sqrt(k) >= 1.0:
        notes.append(f"infeasible at this scale: beta*sqrt(k) = {beta * math.sqrt(k):.3g} >= 1")
    for msg in notes:
        warnings.warn(msg, AsymptoticHypothesisWarning, stacklevel=2)
    bundle = {
        "preset": preset, "ell": ell, "n": n, "k": k, "q": q, "sigma": sigma,
        "m": m, "gamma": gamma, "beta": beta,
        "g": g_for(gamma, m), "feasible": not notes, "warnings": notes,
    }
    return bundle
