"""Command-line front end.

Exit codes: 0 success, 1 domain or runtime error, 2 usage error.
"""
import argparse
import math
import sys

from . import analytic, boundary, branching, montecarlo
from .analytic import QueueParams


def fmt_value(x):
    """Transform values: fixed point, 12 digits after the decimal point."""
    return f"{x:.12f}"


def fmt_num(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _emit(out, pairs):
    for key, value in pairs:
        out.write(f"{key}={fmt_num(value)}\n")


def run_eval(args, out):
    params = QueueParams(args.lam, args.mu)
    out.write(fmt_value(analytic.busy_lt(params, args.s)) + "\n")


def write_curve(curve, stream):
    stream.write("s,L\n")
    for s, v in zip(curve.s.tolist(), curve.values.tolist()):
        stream.write(f"{format(s, '.12g')},{fmt_value(v)}\n")


def run_curve(args, out):
    curve = analytic.lt_curve(QueueParams(args.lam, args.mu), args.s_min, args.s_max, args.points)
    if args.out == "-":
        write_curve(curve, out)
        return
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        write_curve(curve, fh)


def run_simulate(args, out):
    params = QueueParams(args.lam, args.mu)
    config = montecarlo.SimConfig(args.trials, args.seed, args.max_events)
    if args.mode == "time":
        est = montecarlo.estimate_lt_time_domain(params, args.s, config)
    else:
        est = montecarlo.estimate_lt_mc(params, args.s, config)
    closed = analytic.busy_lt(params, args.s)
    diff = est.p_hat - closed
    if est.std_error > 0.0:
        z = diff / est.std_error
    else:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    _emit(out, [
        ("p_hat", est.p_hat),
        ("std_error", est.std_error),
        ("ci95", est.ci95_half_width),
        ("n_trials", est.n_trials),
        ("n_censored", est.n_censored),
        ("closed_form", closed),
        ("z_score", z),
    ])


def run_extinction(args, out):
    if args.probs is not None:
        if args.lam is not None or args.mu is not None:
            raise ValueError("give either --probs or --lambda/--mu, not both")
        dist = branching.OffspringDist([float(p) for p in args.probs.split(",")])
    else:
        if args.lam is None or args.mu is None:
            raise ValueError("need --lambda and --mu (or --probs)")
        dist = branching.offspring_from_queue(QueueParams(args.lam, args.mu))
    result = branching.extinction_probability(dist, args.tol, args.max_iter)
    _emit(out, [("alpha", result.alpha), ("iterations", result.iterations),
                ("converged", result.converged)])


def run_boundary(args, out):
    spec = boundary.BoundarySearchSpec(args.free, args.fixed, args.lo, args.hi, args.tol)
    result = boundary.find_stability_boundary(spec)
    _emit(out, [("value", result.value), ("evaluations", result.evaluations),
                ("bracket_width", result.bracket_width_final)])


def _rate(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _finite(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text!r}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="busylt",
        description="Laplace transform of the M/M/1 busy period, proper or defective.")
    sub = parser.add_subparsers(dest="command", required=True)

    def rates(p, required=True):
        p.add_argument("--lambda", dest="lam", type=_rate, required=required, help="arrival rate")
        p.add_argument("--mu", type=_rate, required=required, help="service rate")

    p = sub.add_parser("eval", help="evaluate L(s)")
    rates(p)
    p.add_argument("--s", type=_finite, required=True, help="transform argument (>= 0)")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("curve", help="write L(s) on a grid as CSV")
    rates(p)
    p.add_argument("--s-min", type=_finite, default=0.0)
    p.add_argument("--s-max", type=_finite, required=True)
    p.add_argument("--points", type=int, default=151)
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.set_defaults(func=run_curve)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of L(s)")
    rates(p)
    p.add_argument("--s", type=_finite, required=True)
    p.add_argument("--trials", type=_positive_int, default=10**6)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mode", choices=("embedded", "time"), default="embedded")
    p.add_argument("--max-events", type=_positive_int, default=None,
                   help="per-trial event cap (default 1e6, or 1e5 at s=0)")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("extinction", help="branching-process extinction probability")
    rates(p, required=False)
    p.add_argument("--probs", help="comma-separated offspring pmf p0,p1,...")
    p.add_argument("--tol", type=_rate, default=branching.DEFAULT_TOL)
    p.add_argument("--max-iter", type=_positive_int, default=branching.DEFAULT_MAX_ITER)
    p.set_defaults(func=run_extinction)

    p = sub.add_parser("boundary", help="locate the stability boundary in one rate")
    p.add_argument("--free", choices=(boundary.ARRIVAL, boundary.SERVICE), required=True)
    p.add_argument("--fixed", type=_rate, required=True, help="value of the other rate")
    p.add_argument("--lo", type=_rate, required=True)
    p.add_argument("--hi", type=_rate, required=True)
    p.add_argument("--tol", type=_rate, default=1e-9)
    p.set_defaults(func=run_boundary)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"busylt {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
