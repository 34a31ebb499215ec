"""``fracdev`` command line.

Exit status: 0 on success, 2 on usage errors (argparse), 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .jumps import Degenerate, parse_jump
from .kernels import cgf_limit_LD, cgf_limit_MD
from .mittag_leffler import MlOverflowError, ml_eval, ml_log_eval
from .output import FORMATS, write_output
from .rates import (
    legendre_transform,
    optimal_theta_MD,
    rate_LD_renewal_form,
    rate_MD_closed,
)
from .samplers import ProcessParams, RngState, sample_compound

__all__ = ["main", "parse_grid"]

SIMULATE_CHUNK = 1 << 16


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` -> ``n`` evenly spaced points from ``a`` to ``b`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"grid needs at least one point, got {text!r}")
    return np.linspace(a, b, n)


def _jump_arg(text: str):
    try:
        return parse_jump(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cmd_ml(args) -> int:
    out = {"nu": args.nu, "x": args.x}
    if args.log:
        out["log_value"] = ml_log_eval(args.nu, args.x)
        try:
            r = ml_eval(args.nu, args.x)
            out.update(value=r.value, method=r.method, est_abs_err=r.est_abs_err)
        except MlOverflowError:
            out.update(value=None, method="asymptotic_positive", est_abs_err=None)
    else:
        r = ml_eval(args.nu, args.x)
        out.update(value=r.value, log_value=r.log_value, method=r.method, est_abs_err=r.est_abs_err)
    keys = ("nu", "x", "value", "log_value", "method", "est_abs_err")
    print(json.dumps({k: out[k] for k in keys}))
    return 0


def _cmd_simulate(args) -> int:
    params = ProcessParams(args.nu, args.lam)
    rng = RngState(args.seed, args.stream)
    left = args.n
    write = sys.stdout.write
    while left > 0:
        size = min(SIMULATE_CHUNK, left)
        draws = sample_compound(params, args.jump, args.t, rng, size=size)
        write("".join(f"{float(v)!r}\n" for v in draws))
        left -= size
    return 0


def _md_cgf_args(args):
    mu = 0.0 if args.mu is None else args.mu
    sigma2 = 0.0 if args.sigma2 is None else args.sigma2
    return mu, sigma2


def _cmd_cgf(args) -> int:
    if args.kind == "ld":
        cgf = cgf_limit_LD(ProcessParams(args.nu, args.lam), args.jump)
    else:
        cgf = cgf_limit_MD(args.nu, args.lam, *_md_cgf_args(args))
    rows = [{"theta": float(th), "value": cgf(float(th))} for th in args.theta_grid]
    write_output(rows, args.format, args.out, columns=["theta", "value"])
    return 0


def _cmd_rate(args) -> int:
    rows = []
    if args.regime == "md":
        mu, sigma2 = _md_cgf_args(args)
        cgf = cgf_limit_MD(args.nu, args.lam, mu, sigma2)
        for x in map(float, args.x_grid):
            closed = rate_MD_closed(args.nu, args.lam, mu, sigma2, x)
            theta = optimal_theta_MD(args.nu, args.lam, mu, sigma2, x) if math.isfinite(closed) else None
            oracle = diff = None
            if args.check_oracle:
                oracle = legendre_transform(cgf, x).value
                diff = 0.0 if closed == oracle else abs(closed - oracle)
            rows.append(dict(x=x, rate_closed=closed, rate_oracle=oracle, argmax_theta=theta, abs_diff=diff))
    else:
        params = ProcessParams(args.nu, args.lam)
        cgf = cgf_limit_LD(params, args.jump)
        counting = args.jump == Degenerate(1.0)
        for x in map(float, args.x_grid):
            res = legendre_transform(cgf, x)
            # the only LD closed form is the counting-process (renewal) expression
            closed = rate_LD_renewal_form(args.nu, args.lam, x) if counting else None
            diff = None
            if closed is not None:
                diff = 0.0 if closed == res.value else abs(closed - res.value)
            rows.append(dict(x=x, rate_closed=closed, rate_oracle=res.value,
                             argmax_theta=res.argmax_theta, abs_diff=diff))
    columns = ["x", "rate_closed", "rate_oracle", "argmax_theta", "abs_diff"]
    write_output(rows, args.format, args.out, columns=columns)
    return 0


def _load_config(args) -> harness.ExperimentConfig:
    path = Path(args.config)
    if not path.exists():
        path = harness.builtin_config(args.config)
    config = harness.ExperimentConfig.load(path, workers=args.workers)
    if args.seed is not None or args.n is not None:
        d = config.to_dict()
        if args.seed is not None:
            d["seed"] = args.seed
        if args.n is not None:
            d["n_samples"] = args.n
        config = harness.ExperimentConfig.from_dict(d, workers=config.workers)
    return config


def _warn_trend(trend: dict, what: str) -> None:
    for key, ok in sorted(trend.items()):
        if not ok:
            print(f"fracdev: note: {what} is not monotone in t at {key!r}", file=sys.stderr)


def _cmd_verify_weak(args) -> int:
    rows = harness.run_weak_convergence(_load_config(args))
    write_output(rows, args.format, args.out)
    return 0


def _cmd_verify_md(args) -> int:
    rows = harness.run_md_tail(_load_config(args))
    _warn_trend(harness.decreasing_in_t(rows, "x", "empirical_rate"), "empirical_rate")
    write_output(rows, args.format, args.out)
    return 0


def _cmd_verify_lln(args) -> int:
    rows = harness.run_lln_decay(_load_config(args))
    _warn_trend(harness.decreasing_in_t(rows, "eps", "p_hat"), "P(|S/t - center| > eps)")
    write_output(rows, args.format, args.out)
    return 0


def _add_process(p, with_jump: bool = False, jump_default=None):
    p.add_argument("--nu", type=float, required=True, help="fractional order in (0, 1)")
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="Poisson intensity")
    if with_jump:
        p.add_argument("--jump", type=_jump_arg, required=jump_default is None,
                       default=jump_default, help="jump law, e.g. gauss:0,1 deg:1 unif:-1,1 twopoint:1,-1,0.5 exp:2")


def _add_output(p):
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", default=None, help="output file (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdev",
        description="Compound fractional Poisson processes: Mittag-Leffler numerics, "
        "samplers, rate functions and Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml", help="evaluate the Mittag-Leffler function E_nu(x)")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--log", action="store_true", help="also report log E_nu(x) past overflow")
    p.set_defaults(func=_cmd_ml)

    p = sub.add_parser("simulate", help="draw S_{nu,lambda}(t), one value per line")
    _add_process(p, with_jump=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("-n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream", type=int, default=0, help="substream id")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cgf", help="tabulate a scaled CGF limit")
    p.add_argument("--kind", choices=("ld", "md"), required=True)
    _add_process(p, with_jump=True, jump_default=Degenerate(1.0))
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--theta-grid", type=parse_grid, required=True, help="a:b:n")
    _add_output(p)
    p.set_defaults(func=_cmd_cgf)

    p = sub.add_parser("rate", help="tabulate LD or MD rate functions")
    p.add_argument("--regime", choices=("ld", "md"), required=True)
    _add_process(p, with_jump=True, jump_default=Degenerate(1.0))
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--x-grid", type=parse_grid, required=True, help="a:b:n")
    p.add_argument("--check-oracle", action="store_true",
                   help="also compute the numerical Legendre transform (md)")
    _add_output(p)
    p.set_defaults(func=_cmd_rate)

    for name, func, help_ in (
        ("verify-weak", _cmd_verify_weak, "weak convergence of the alpha-scaled variable"),
        ("verify-md", _cmd_verify_md, "moderate-deviation tail decay"),
        ("verify-lln", _cmd_verify_lln, "decay of P(|S/t| > eps)"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True,
                       help="JSON config path or built-in name (weak_mu0, weak_mu1, md_tail, lln, lln_nu1)")
        p.add_argument("--workers", type=int, default=None, help="overrides config and FRACDEV_WORKERS")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("-n", type=int, default=None, help="override n_samples")
        _add_output(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"fracdev: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
