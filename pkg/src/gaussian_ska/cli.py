"""Command-line front end.

Subcommands: ``region``, ``member``, ``verify``, ``simulate`` and
``estimate-mi``. Exit codes: 0 success, 1 bad parameters, 2 a verification
sweep failed. Rates are computed in nats and converted to bits only when
written out.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import region, verify
from .errors import GaussianSKAError
from .info_calc import TestChannel, mc_mi_estimate
from .protocol import (
    EncoderMode,
    ProtocolConfig,
    build_codebook,
    estimate_secrecy_leakage,
    privacy_leakage_budget,
    run_trials,
)
from .region import ModelKind, RateTuple
from .source_model import ChannelOrder, SourceParams, classify

EXIT_OK = 0
EXIT_PARAM = 1
EXIT_VERIFY = 2

REGION_HEADER = ["alpha", "RS_max", "RJ_min", "RL_min", "model", "rho1", "rho2", "units"]


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with parameter errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _scale(units: str) -> float:
    return 1.0 / math.log(2.0) if units == "bits" else 1.0


def _seed(value):
    if value is None:
        return int(np.random.SeedSequence().entropy % (1 << 32))
    return value


def _alpha_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty alpha list")
    return vals


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_source(p, model=True):
    p.add_argument("--rho1", type=float, required=True, help="correlation of X and Y")
    p.add_argument("--rho2", type=float, required=True, help="correlation of X and Z")
    if model:
        p.add_argument("--model", choices=["gs", "cs"], default="gs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussian-ska", description="Gaussian secret-key agreement with an eavesdropper.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("region", help="trace the capacity-region boundary")
    _add_source(p)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--alpha", type=float, help="single test-channel parameter")
    grid.add_argument("--alphas", type=_alpha_list, help="comma-separated alpha values")
    p.add_argument("--num", type=int, default=64, help="points of the default log grid on [1e-4, 1]")
    p.add_argument("--units", choices=["nats", "bits"], default="nats")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("member", help="test whether a rate tuple is achievable")
    _add_source(p)
    p.add_argument("--rs", type=float, required=True, help="secret-key rate")
    p.add_argument("--rj", type=float, required=True, help="storage rate")
    p.add_argument("--rl", type=float, required=True, help="privacy-leakage rate")
    p.add_argument("--tol", type=float, default=region.DEFAULT_TOL)
    p.add_argument("--units", choices=["nats", "bits"], default="nats", help="units of the given rates")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("verify", help="run the identity and inequality sweeps")
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--rho-max", type=float, default=0.99, help="largest |rho| drawn")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("simulate", help="run the finite-n protocol")
    _add_source(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="blocklength")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=["faithful", "greedy"], default="greedy")
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--leak-outer", type=_nonneg_int, default=100, help="eavesdropper draws; 0 skips leakage")
    p.add_argument("--leak-inner", type=_nonneg_int, default=100, help="identifier draws per eavesdropper draw")
    p.add_argument("--units", choices=["nats", "bits"], default="nats")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("estimate-mi", help="calibrate the Monte-Carlo MI estimator")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--units", choices=["nats", "bits"], default="nats")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _emit_rows(rows: list[dict], header: list[str], fmt: str, out):
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    w = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def cmd_region(args, out) -> int:
    params = SourceParams(args.rho1, args.rho2)
    model = ModelKind(args.model)
    k = _scale(args.units)
    base = {"model": model.value, "rho1": params.rho1, "rho2": params.rho2, "units": args.units}
    if classify(params) is ChannelOrder.EAVESDROPPER_STRONGER:
        deg = region.degenerate_region(params)
        # alpha is meaningless here; U is constant
        rows = [{"alpha": 1.0, "RS_max": deg.RS_exact * k, "RJ_min": deg.RJ_min * k, "RL_min": deg.RL_min * k, **base}]
    else:
        if args.alpha is not None:
            grid = [args.alpha]
        elif args.alphas is not None:
            grid = args.alphas
        else:
            grid = region.default_alpha_grid(args.num)
        tcs = [TestChannel(float(a)) for a in grid]
        rows = []
        for tc in tcs:
            b = region.boundary_point(params, model, tc)
            rows.append({"alpha": b.alpha, "RS_max": b.RS_max * k, "RJ_min": b.RJ_min * k, "RL_min": b.RL_min * k, **base})
    _emit_rows(rows, REGION_HEADER, args.format, out)
    return EXIT_OK


def cmd_member(args, out) -> int:
    params = SourceParams(args.rho1, args.rho2)
    k = _scale(args.units)
    t = RateTuple(args.rs / k, args.rj / k, args.rl / k)
    witness = region.membership_witness(params, ModelKind(args.model), t, args.tol / k)
    if args.format == "json":
        json.dump({"achievable": witness is not None, "alpha": witness}, out)
        out.write("\n")
    elif witness is None:
        out.write("unachievable\n")
    else:
        out.write(f"achievable alpha={witness!r}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.draws < 1:
        raise ValueError("--draws must be >= 1")
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    seed = _seed(args.seed)
    jobs = [(fn, max(1, args.draws // thin)) for fn, thin in verify.CHECKS]
    # map() keeps submission order, so output never depends on scheduling
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda job: job[0](job[1], seed, args.rho_max), jobs))
    ok = all(r.passed for r in results)
    if args.format == "json":
        payload = {
            "seed": seed,
            "passed": ok,
            "checks": [
                {"name": r.name, "max_residual": float(r.max_residual), "tol": r.tol, "draws": r.draws, "passed": r.passed}
                for r in results
            ],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(f"seed={seed}\n")
        for r in results:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28} max_residual={float(r.max_residual):.3e}  tol={r.tol:.0e}  draws={r.draws}\n")
        out.write("all checks passed\n" if ok else "verification FAILED\n")
    return EXIT_OK if ok else EXIT_VERIFY


def simulate_payload(args) -> dict:
    """Run one simulation and return the flat JSON object (wall_time included)."""
    seed = _seed(args.seed)
    params = SourceParams(args.rho1, args.rho2)
    cfg = ProtocolConfig(
        params=params,
        tc=TestChannel(args.alpha),
        n=args.n,
        gamma=args.gamma,
        seed=seed,
        encoder_mode=EncoderMode(args.mode),
        model=ModelKind(args.model),
    )
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    if args.leak_outer and not (args.leak_outer >= 100 and args.leak_inner >= 100):
        raise ValueError("--leak-outer and --leak-inner must be >= 100 (or --leak-outer 0 to skip)")
    t0 = time.perf_counter()
    cb = build_codebook(cfg)
    rep = run_trials(cfg, cb, args.trials)
    leak = None
    if args.leak_outer:
        leak = estimate_secrecy_leakage(cfg, cb, args.leak_outer, args.leak_inner)
    wall = time.perf_counter() - t0
    k = _scale(args.units)
    return {
        "rho1": params.rho1,
        "rho2": params.rho2,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "n": args.n,
        "trials": args.trials,
        "model": cfg.model.value,
        "mode": cfg.encoder_mode.value,
        "seed": seed,
        "units": args.units,
        "error_rate": rep.error_rate,
        "fallback_rate": rep.fallback_rate,
        "key_entropy_hat": rep.key_entropy_hat * k,
        "key_entropy_max": rep.key_entropy_max * k,
        "leakage_hat": None if leak is None else leak.leakage_hat * k,
        "leakage_bias_bound": None if leak is None else leak.bias_bound * k,
        "mu_hat": None if leak is None else leak.mu_hat,
        "privacy_budget": privacy_leakage_budget(cfg) * k,
        "M_S": rep.M_S,
        "M_J": rep.M_J,
        "Q": rep.Q,
        "leak_outer": args.leak_outer,
        "leak_inner": args.leak_inner if args.leak_outer else 0,
        "wall_time": wall,
    }


def cmd_simulate(args, out) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        payload = simulate_payload(args)
    if args.format == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        _emit_rows([payload], list(payload), "csv", out)
    return EXIT_OK


def cmd_estimate_mi(args, out) -> int:
    if not -1.0 < args.rho < 1.0:
        raise ValueError("--rho must lie in (-1, 1)")
    seed = _seed(args.seed)
    cov = np.array([[1.0, args.rho], [args.rho, 1.0]])
    est = mc_mi_estimate(cov, args.samples, seed)
    analytic = -0.5 * math.log1p(-args.rho**2)
    k = _scale(args.units)
    z = (est.estimate - analytic) / est.stderr if est.stderr > 0 else 0.0
    row = {
        "rho": args.rho,
        "samples": est.samples,
        "analytic": analytic * k,
        "estimate": est.estimate * k,
        "stderr": est.stderr * k,
        "z": z,
        "seed": seed,
        "units": args.units,
    }
    _emit_rows([row], list(row), args.format, out)
    return EXIT_OK


_COMMANDS = {
    "region": cmd_region,
    "member": cmd_member,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "estimate-mi": cmd_estimate_mi,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (GaussianSKAError, ValueError) as exc:
        print(f"gaussian-ska {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
