"""Command-line front end: evaluation, sweeps, worst-case search, simulation,
lower bounds, and the summary-table reproduction.

Exit codes: 0 success, 1 validation failure, 2 summary-table check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import exact, lowerbound, montecarlo
from .constants import PHI, SQRT2, SQRT3, SQRT5, SQRT10
from .protocols import PROTOCOL_IDS, hybrid_unbounded, hybrid_8bit, make_protocol


def parse_number(text: str) -> float:
    """Parse a numeric flag, accepting exact fractions like `1/3`."""
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number {text!r}: {exc}")


def _coerce_param(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError):
        return value


def _protocol_from_args(args) -> "Protocol":
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ValueError(f"bad --param {item!r}: expected key=value")
        key, value = item.split("=", 1)
        params[key.strip()] = _coerce_param(value.strip())
    return make_protocol(args.protocol, **params)


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _add_protocol_flags(sub):
    sub.add_argument("--protocol", required=True, choices=PROTOCOL_IDS)
    sub.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="protocol parameter, repeatable (e.g. --param l=3)")


def cmd_eval(args) -> int:
    P = _protocol_from_args(args)
    x = args.x
    print(json.dumps({
        "protocol": P.pid,
        "x": x,
        "mse": exact.mse_at(P, x),
        "bias": exact.bias_at(P, x),
        "variance": exact.variance_at(P, x),
    }))
    return 0


def cmd_sweep(args) -> int:
    P = _protocol_from_args(args)
    xs = exact.grid_for(P, args.points)
    prof = exact.profile(P, xs)
    fh, own = _open_out(args.out)
    try:
        prof.write_csv(fh)
    finally:
        if own:
            fh.close()
    return 0


def cmd_worst(args) -> int:
    P = _protocol_from_args(args)
    cost, argmax = exact.worst_case(P)
    print(json.dumps({"protocol": P.pid, "cost": cost, "argmax": argmax}))
    return 0


def cmd_mc(args) -> int:
    P = _protocol_from_args(args)
    report = montecarlo.simulate(P, args.x, args.trials, args.seed)
    print(report.to_json())
    return 0


def cmd_lb(args) -> int:
    if args.named:
        dist = lowerbound.named_distribution(args.named)
    elif args.dist:
        dist = lowerbound.DiscreteDistribution.from_file(args.dist)
    else:
        raise ValueError("lb requires --named or --dist")
    cert = lowerbound.optimal_deterministic_cost(dist, args.k)
    print(json.dumps({
        "k": args.k,
        "bound": cert.bound,
        "centroids": list(cert.centroids),
        "partition": list(cert.partition),
    }))
    return 0


def cmd_mean_demo(args) -> int:
    P = _protocol_from_args(args)
    xs = np.linspace(0.0, 1.0, args.senders)
    report = montecarlo.mean_estimation(xs, P, args.seed)
    print(report.to_json())
    return 0


def _table1_rows():
    """(label, computed-value thunk, expected value) for every numeric cell."""
    return [
        ("1 bit, private randomness only, unbiased",
         lambda: exact.worst_case(make_protocol("rr"))[0],
         0.25),
        ("1 bit, deterministic",
         lambda: exact.worst_case(make_protocol("dr"))[0],
         1.0 / 16.0),
        ("1 bit, 1 shared bit, unbiased",
         lambda: exact.worst_case(make_protocol("shared-unbiased", l=1))[0],
         1.0 / 8.0),
        ("1 bit, 8 shared bits, unbiased",
         lambda: exact.worst_case(make_protocol("shared-unbiased", l=8))[0],
         1.0 / 12.0 + 1.0 / 393216.0),
        ("1 bit, 1 shared bit, biased",
         lambda: exact.worst_case(make_protocol("biased-shared", l=1))[0],
         1.0 / 18.0),
        ("1 bit, 8 shared bits, biased (hybrid)",
         lambda: exact.worst_case(hybrid_8bit())[0],
         (1830635.0 - 1232945.0 * SQRT2) / 1858592.0),
        ("1 bit, unbounded shared randomness, biased (hybrid)",
         lambda: exact.worst_case(hybrid_unbounded())[0],
         (6.0 * SQRT10 + 11.0 * SQRT5 - 18.0 * SQRT2 - 17.0) / 24.0),
        ("lower bound, biased (golden-ratio prior)",
         lambda: lowerbound.optimal_deterministic_cost(
             lowerbound.named_distribution("golden4"), 1).bound,
         (5.0 * PHI - 8.0) / 2.0),
        ("three-point input, 1 shared bit, unbiased",
         lambda: exact.worst_case(make_protocol("three-unbiased"))[0],
         1.0 / 16.0),
        ("three-point input, 1 shared bit, biased",
         lambda: exact.worst_case(make_protocol("three-biased"))[0],
         0.75 - 1.0 / SQRT2),
        ("three-point input, lower bound",
         lambda: lowerbound.optimal_deterministic_cost(
             lowerbound.named_distribution("sqrt2-3"), 1).bound,
         0.75 - 1.0 / SQRT2),
    ]


def cmd_table1(args) -> int:
    fh, own = _open_out(args.out)
    try:
        failures = 0
        fh.write(f"{'cell':58s} {'computed':>22s} {'expected':>22s}  status\n")
        for label, thunk, expected in _table1_rows():
            value = thunk()
            ok = abs(value - expected) <= 1e-9
            failures += 0 if ok else 1
            fh.write(f"{label:58s} {value:22.15g} {expected:22.15g}  "
                     f"{'pass' if ok else 'FAIL'}\n")
        fh.write(f"{'1 bit, deterministic, unbiased':58s} {'—':>22s} {'—':>22s}  "
                 "Impossible\n")
        fh.write(f"{'1 bit, private randomness only, biased':58s} {'—':>22s} {'—':>22s}  "
                 "Open\n")

        # Monte Carlo cross-check against the exact engine (fixed seed)
        P = make_protocol("shared-unbiased", l=3)
        x = 0.37
        report = montecarlo.simulate(P, x, 200_000, seed=20240817)
        target = exact.mse_at(P, x)
        ok = abs(report.mse - target) <= 4.0 * report.stderr
        failures += 0 if ok else 1
        fh.write(f"{'Monte Carlo cross-check (4 standard errors)':58s} "
                 f"{report.mse:22.15g} {target:22.15g}  {'pass' if ok else 'FAIL'}\n")
        return 2 if failures else 0
    finally:
        if own:
            fh.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onebit",
        description="One-bit and k-bit transmission protocols for reals in [0,1]: "
                    "exact costs, worst cases, simulation, and lower bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="exact mse/bias/variance at one input")
    _add_protocol_flags(p)
    p.add_argument("--x", type=parse_number, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="CSV cost profile over a grid")
    _add_protocol_flags(p)
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("worst", help="worst-case cost and the inputs attaining it")
    _add_protocol_flags(p)
    p.set_defaults(func=cmd_worst)

    p = sub.add_parser("mc", help="Monte Carlo simulation report")
    _add_protocol_flags(p)
    p.add_argument("--x", type=parse_number, required=True)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("lb", help="lower bound from a discrete prior")
    p.add_argument("--named", choices=lowerbound.NAMED_DISTRIBUTIONS)
    p.add_argument("--dist", help="prior file: `point weight` per line")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_lb)

    p = sub.add_parser("table1", help="recompute the summary table and verify it")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("mean-demo", help="distributed mean-estimation demo")
    _add_protocol_flags(p)
    p.add_argument("--senders", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_mean_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
