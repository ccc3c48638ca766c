"""Experiment orchestration: planted-instance builders with sealed secret
transcripts, named verification batteries, and empirical distinguisher
advantage with Wilson intervals.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import gmm as gmm_mod
from .distributions import (
    ClweBatch,
    ClweParams,
    LweBatch,
    LweParams,
    gen_clwe,
    gen_lwe,
    gen_null,
    gen_trunc_hclwe,
)
from .numerics import (
    center_mod,
    chi2_gof,
    chi2_uniform_modq,
    discrete_gaussian_pmf,
    discrete_gaussian_support,
    fold_pmf_modq,
    gaussian_cdf,
    ks_test,
    wrapped_gaussian_cdf,
)
from .samplers import RngStream, SecretVector, sample_sparse_secret, sample_unit_secret
from .serialize import FORMAT_VERSION, dumps_record, read_samples, write_samples

__all__ = [
    "ExperimentConfig",
    "AdvantageReport",
    "BATTERIES",
    "plant",
    "estimate_advantage",
    "verify",
    "wilson_interval",
]

SCENARIOS = ("lwe", "fixed-norm-lwe", "clwe", "sparse-clwe", "trunc-hclwe", "lwe-null", "clwe-null")


@dataclass
class ExperimentConfig:
    """Validated bundle of scenario name, numeric parameters and paths."""

    scenario: str
    seed: int
    count: int
    n: int = 0
    m: int = 0
    q: int = 0
    sigma: float = 0.0
    k: int = 0
    r: float = 0.0
    gamma: float = 0.0
    beta: float = 0.0
    g: int = 0
    c_slack: float = 4.0
    out: str = ""
    transcript: str = ""

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.count < 1:
            raise ValueError("count must be positive")
        needs = {
            "lwe": ("n", "q", "sigma", "k"),
            "fixed-norm-lwe": ("n", "q", "sigma", "k"),
            "clwe": ("n", "gamma", "beta"),
            "sparse-clwe": ("n", "gamma", "beta", "k"),
            "trunc-hclwe": ("n", "gamma", "beta", "k", "g"),
            "lwe-null": ("n", "q"),
            "clwe-null": ("n",),
        }[self.scenario]
        for key in needs:
            if not getattr(self, key):
                raise ValueError(f"scenario {self.scenario!r} needs parameter {key!r}")
        if self.k and not (1 <= self.k <= max(self.n, 1)):
            raise ValueError("need 1 <= k <= n")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        allowed = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in allowed})

    def params_dict(self) -> dict:
        keys = ("scenario", "count", "n", "m", "q", "sigma", "k", "r", "gamma", "beta", "g", "c_slack")
        return {k: getattr(self, k) for k in keys if getattr(self, k)}


def _plant_batch(cfg: ExperimentConfig, rng):
    n, m = cfg.n, cfg.count
    if cfg.scenario in ("lwe", "fixed-norm-lwe"):
        secret = sample_sparse_secret(n, cfg.k, rng)
        if cfg.scenario == "fixed-norm-lwe":
            secret = SecretVector(secret.entries, "fixed-norm", 1.0, cfg.k)
        params = LweParams(n, m, cfg.q, cfg.sigma)
        return gen_lwe(params, secret, m, rng), secret
    if cfg.scenario == "clwe":
        secret = sample_unit_secret(n, rng)
        return gen_clwe(ClweParams(n, m, cfg.gamma, cfg.beta), secret, m, rng), secret
    if cfg.scenario == "sparse-clwe":
        s = sample_sparse_secret(n, cfg.k, rng)
        secret = s.scaled(1.0 / math.sqrt(cfg.k), "scaled-sparse")
        return gen_clwe(ClweParams(n, m, cfg.gamma, cfg.beta), secret, m, rng), secret
    if cfg.scenario == "trunc-hclwe":
        s = sample_sparse_secret(n, cfg.k, rng)
        secret = s.scaled(1.0 / math.sqrt(cfg.k), "scaled-sparse")
        spec = gmm_mod.package_gmm(secret, cfg.gamma, cfg.beta, cfg.g)
        return gen_trunc_hclwe(spec, m, rng), secret
    if cfg.scenario == "lwe-null":
        return gen_null("lwe-discrete", n, m, rng, q=cfg.q), None
    if cfg.scenario == "clwe-null":
        return gen_null("clwe", n, m, rng), None
    raise AssertionError("unreachable")


def plant(scenario: str, config: dict, rng=None):
    """Generate a planted (or null) sample file plus its sealed transcript.

    Returns (samples_path, transcript_path). Equal configs and seeds give
    byte-identical files.
    """
    d = dict(config)
    d["scenario"] = scenario
    cfg = ExperimentConfig.from_dict(d)
    if not cfg.out or not cfg.transcript:
        raise ValueError("config must define 'out' and 'transcript' paths")
    if rng is None:
        rng = RngStream(cfg.seed)
    batch, secret = _plant_batch(cfg, rng)
    write_samples(cfg.out, batch, cfg.params_dict(), cfg.seed)
    transcript = {
        "record": "transcript",
        "format_version": FORMAT_VERSION,
        "scenario": scenario,
        "seed": cfg.seed,
        "params": cfg.params_dict(),
        "secret": secret.as_dict() if secret is not None else None,
    }
    with open(cfg.transcript, "w") as fh:
        fh.write(dumps_record(transcript) + "\n")
    return cfg.out, cfg.transcript


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class AdvantageReport:
    advantage: float
    trials: int
    interval: tuple
    accept_a: float
    accept_b: float
    interval_a: tuple
    interval_b: tuple

    def __post_init__(self):
        lo, hi = self.interval
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("advantage interval must lie inside [0,1]")

    def as_dict(self):
        return {
            "advantage": self.advantage,
            "trials": self.trials,
            "interval": list(self.interval),
            "accept_a": self.accept_a,
            "accept_b": self.accept_b,
            "interval_a": list(self.interval_a),
            "interval_b": list(self.interval_b),
        }


def estimate_advantage(distinguisher, gen_a, gen_b, trials: int, rng) -> AdvantageReport:
    """Empirical |Pr[D(a-samples)=1] - Pr[D(b-samples)=1]| over fresh batches.

    gen_a and gen_b are callables taking a child RngStream and returning one
    batch; the distinguisher maps a batch to a boolean. Each trial uses
    derived streams, so the estimate is reproducible from the parent stream.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials per arm")
    if not isinstance(rng, RngStream):
        raise TypeError("estimate_advantage needs an RngStream for per-trial derivation")
    hits = [0, 0]
    for arm, gen in enumerate((gen_a, gen_b)):
        for t in range(trials):
            child = rng.child(arm * trials + t)
            batch = gen(child)
            try:
                out = distinguisher(batch)
            except Exception as exc:
                raise RuntimeError(f"distinguisher raised on arm {arm}, trial {t}: {exc}") from exc
            hits[arm] += int(bool(out))
    p_a, p_b = hits[0] / trials, hits[1] / trials
    ia = wilson_interval(hits[0], trials)
    ib = wilson_interval(hits[1], trials)
    diff_lo = ia[0] - ib[1]
    diff_hi = ia[1] - ib[0]
    if diff_lo <= 0.0 <= diff_hi:
        lo, hi = 0.0, max(abs(diff_lo), abs(diff_hi))
    else:
        lo, hi = min(abs(diff_lo), abs(diff_hi)), max(abs(diff_lo), abs(diff_hi))
    return AdvantageReport(abs(p_a - p_b), trials, (lo, min(1.0, hi)), p_a, p_b, ia, ib)


# ---------------------------------------------------------------------------
# verification batteries


def _secret_from_transcript(transcript):
    raw = transcript.get("secret")
    if raw is None:
        raise ValueError("transcript carries no secret for a residual battery")
    return SecretVector.from_dict(raw)


def _battery_clwe_residual(header, batch, transcript, threshold):
    if not isinstance(batch, ClweBatch):
        raise ValueError("clwe-residual battery needs CLWE samples")
    secret = _secret_from_transcript(transcript)
    params = header["params"]
    gamma, beta = params["gamma"], params["beta"]
    resid = center_mod(batch.b - gamma * (batch.a @ secret.vector()), 1.0)
    return [ks_test(resid, wrapped_gaussian_cdf(beta, 1.0), threshold, name="clwe-residual-ks")]


def _battery_clwe_null(header, batch, transcript, threshold):
    if not isinstance(batch, ClweBatch):
        raise ValueError("clwe-null battery needs CLWE samples")
    reports = [ks_test(batch.b, lambda x: np.clip(x, 0.0, 1.0), threshold, name="clwe-null-b-ks")]
    reports.append(ks_test(batch.a.ravel(), gaussian_cdf(1.0), threshold, name="clwe-null-a-ks"))
    return reports


def _battery_lwe_residual(header, batch, transcript, threshold):
    if not isinstance(batch, LweBatch):
        raise ValueError("lwe-residual battery needs LWE samples")
    secret = _secret_from_transcript(transcript)
    params = header["params"]
    sigma, q = params["sigma"], batch.q
    resid = batch.b - batch.a @ secret.vector()
    if batch.b_domain == "zq":
        resid = np.asarray(np.round(center_mod(resid, q)), dtype=np.int64)
        support = discrete_gaussian_support(sigma)
        vals, probs = fold_pmf_modq(support, discrete_gaussian_pmf(sigma, support), int(q))
        return [chi2_gof(resid, vals, probs, threshold, name="lwe-residual-chi2")]
    resid = center_mod(resid, q)
    return [ks_test(resid, wrapped_gaussian_cdf(sigma, q), threshold, name="lwe-residual-ks")]


def _battery_lwe_null(header, batch, transcript, threshold):
    if not isinstance(batch, LweBatch):
        raise ValueError("lwe-null battery needs LWE samples")
    q = batch.q
    reports = []
    if batch.b_domain == "zq":
        reports.append(chi2_uniform_modq(batch.b, int(q), threshold, name="lwe-null-b-chi2"))
    else:
        reports.append(ks_test(batch.b, lambda x: np.clip(x / q, 0, 1), threshold, name="lwe-null-b-ks"))
    if batch.a_domain == "zq":
        reports.append(chi2_uniform_modq(batch.a, int(q), threshold, name="lwe-null-a-chi2"))
    else:
        reports.append(ks_test(batch.a.ravel(), lambda x: np.clip(x / q, 0, 1), threshold,
                               name="lwe-null-a-ks"))
    return reports


# name -> (version, runner); acceptance criteria cite these names
BATTERIES = {
    "clwe-residual": (1, _battery_clwe_residual),
    "clwe-null": (1, _battery_clwe_null),
    "lwe-residual": (1, _battery_lwe_residual),
    "lwe-null": (1, _battery_lwe_null),
}


def verify(samples_path: str, transcript_path: str, battery: str, threshold: float = 0.001):
    """Run a named battery binding a sample file to its transcript.

    The header and transcript must agree on seed and parameters. Inputs are
    never mutated. Returns the list of TestReports.
    """
    if battery not in BATTERIES:
        raise ValueError(f"unknown battery {battery!r}; known: {sorted(BATTERIES)}")
    header, batch = read_samples(samples_path)
    with open(transcript_path) as fh:
        transcript = json.loads(fh.readline())
    if transcript.get("seed") != header.get("seed"):
        raise ValueError("transcript/header seed mismatch")
    if transcript.get("params") != header.get("params"):
        raise ValueError("transcript/header parameter mismatch")
    _, runner = BATTERIES[battery]
    return runner(header, batch, transcript, threshold)
