"""Command-line entry points.

All primary output is JSON on stdout; progress and warnings go to stderr.
Exit codes: 0 success, 1 verification failure, 2 usage error. Every run is
reproducible from (argv, seed).
"""

import argparse
import json
import sys

import numpy as np

from . import gmm as gmm_mod
from . import pipeline as pipe
from .harness import BATTERIES, estimate_advantage, plant, verify
from .numerics import center_mod, ks_test, wrapped_gaussian_cdf
from .distributions import ClweParams, gen_clwe, gen_null
from .samplers import RngStream, sample_unit_secret
from .serialize import dumps_record, read_samples, write_samples

__all__ = ["cli_main", "main"]


def _log(msg):
    print(msg, file=sys.stderr)


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a flat JSON object")
    return cfg


def _merged(args, keys):
    cfg = _load_config(getattr(args, "config", None))
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            out[key] = val
    return out


def _cmd_params(args):
    if args.scenario == "fixed-norm":
        p = pipe.plan(args.n, args.m, args.q, args.r, args.sigma, args.c_slack)
        print(dumps_record(p.as_dict()))
    elif args.scenario in ("gmm-poly", "gmm-subexp"):
        bundle = gmm_mod.gmm_experiment_params(
            args.scenario.removeprefix("gmm-"), args.ell, alpha=args.alpha,
            delta=args.delta, c_slack=args.c_slack)
        print(dumps_record(bundle))
    elif args.scenario == "solver":
        sp = gmm_mod.SolverParams(args.n, args.k, args.gamma, args.beta, args.m_multiplier)
        print(dumps_record({
            "n": sp.n, "k": sp.k, "gamma": sp.gamma, "beta": sp.beta,
            "gamma_prime": sp.gamma_prime, "modulus_f": sp.modulus_f,
            "m": sp.m, "delta": sp.delta, "a_thresh": sp.a_thresh}))
    else:
        raise ValueError(f"unknown params scenario {args.scenario!r}")
    return 0


def _cmd_sample(args):
    keys = ("count", "n", "m", "q", "sigma", "k", "r", "gamma", "beta", "g", "c_slack", "seed")
    cfg = _merged(args, keys)
    cfg["out"] = args.out
    cfg["transcript"] = args.transcript
    out, transcript = plant(args.scenario, cfg)
    _log(f"wrote {out} and {transcript}")
    print(dumps_record({"out": out, "transcript": transcript, "seed": cfg.get("seed", 0)}))
    return 0


def _cmd_reduce(args):
    cfg = _load_config(args.plan)
    rng = RngStream(args.seed)
    header, batch = read_samples(args.infile)
    if args.pipeline == "lwe2clwe":
        p = pipe.plan(cfg["n"], cfg["m"], cfg["q"], cfg["r"], cfg["sigma"],
                      cfg.get("c_slack", 4.0))
        out_batch, _ = pipe.run_pipeline(batch, p, rng)
        params = {"pipeline": "lwe2clwe", "plan": p.as_dict(), "source_seed": header["seed"]}
    elif args.pipeline == "clwe2lwe":
        q, tau = int(cfg["q"]), float(cfg["tau"])
        scaled, _ = pipe.reverse_scale(batch, q, tau)
        out_batch = pipe.reverse_discretize(scaled, tau, rng)
        params = {"pipeline": "clwe2lwe", "plan": {"q": q, "tau": tau},
                  "source_seed": header["seed"]}
    else:
        raise ValueError(f"unknown pipeline {args.pipeline!r}")
    write_samples(args.out, out_batch, params, args.seed)
    _log(f"wrote {args.out}")
    print(dumps_record({"out": args.out, "count": out_batch.m, "params": params}))
    return 0


def _cmd_solve(args):
    header, batch = read_samples(args.infile)
    samples = batch if isinstance(batch, np.ndarray) else batch.a
    sp = gmm_mod.SolverParams(args.n, args.k, args.gamma, args.beta, args.m_multiplier)
    if args.m is not None:
        sp.m = args.m
    secret, info = gmm_mod.solve_sparse_hclwe(samples, sp)
    result = {
        "secret": secret.as_dict() if secret is not None else None,
        "ambiguous": info["ambiguous"],
        "m": sp.m,
        "n_candidates": info["n_candidates"],
        "pass_counts": info["pass_counts"],
    }
    print(dumps_record(result))
    return 0


def _cmd_verify(args):
    reports = verify(args.infile, args.transcript, args.battery, args.level)
    print(dumps_record({"battery": args.battery,
                        "version": BATTERIES[args.battery][0],
                        "reports": [r.as_dict() for r in reports]}))
    return 0 if all(r.passed for r in reports) else 1


def _cmd_advantage(args):
    rng = RngStream(args.seed)
    n, gamma, beta, batch_size = args.n, args.gamma, args.beta, args.batch
    secret = sample_unit_secret(n, rng)
    params = ClweParams(n, batch_size, gamma, beta)

    def gen_planted(child):
        return gen_clwe(params, secret, batch_size, child)

    def gen_nullarm(child):
        return gen_null("clwe", n, batch_size, child)

    def distinguisher(b):
        # claim "planted" when the centered residual along the planted
        # direction is KS-consistent with a width-beta Gaussian
        resid = center_mod(b.b - gamma * (b.a @ secret.vector()), 1.0)
        return ks_test(resid, wrapped_gaussian_cdf(beta, 1.0), threshold=args.level).passed

    report = estimate_advantage(distinguisher, gen_planted, gen_nullarm, args.trials, rng)
    print(dumps_record(report.as_dict()))
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(prog="clwekit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive parameter bundles")
    p.add_argument("--scenario", required=True,
                   choices=["fixed-norm", "gmm-poly", "gmm-subexp", "solver"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--c-slack", type=float, default=4.0)
    p.add_argument("--m-multiplier", type=float, default=1.0)
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("sample", help="plant a sample file plus sealed transcript")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", help="flat key-value JSON with defaults")
    p.add_argument("--count", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--g", type=int)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("reduce", help="run a reduction pipeline over a sample file")
    p.add_argument("--pipeline", required=True, choices=["lwe2clwe", "clwe2lwe"])
    p.add_argument("--plan", required=True, help="flat key-value JSON plan config")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("solve", help="brute-force a planted sparse direction")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--m-multiplier", type=float, default=1.0)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="run a named battery against a sample file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--battery", required=True)
    p.add_argument("--level", type=float, default=0.001)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("advantage", help="estimate distinguisher advantage, planted vs null")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--batch", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--level", type=float, default=0.01)
    p.set_defaults(func=_cmd_advantage)
    return ap


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        _log(f"error: {exc}")
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
