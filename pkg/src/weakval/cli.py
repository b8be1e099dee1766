"""Command-line front end.

CSV goes to standard output (or ``--out``); human-readable notes go to
standard error. Exit codes: 0 success, 2 invalid configuration, 3 too few
post-selected trials.
"""

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import analytic, coin
from .errors import InsufficientPostselection, WeakValueError
from .meter import GaussianMeter, postselected_mean_shift, postselected_mean_shift_quadrature
from .montecarlo import DEFAULT_HEADS_PROB, DEFAULT_SEED, RunConfig, run_simulation
from .qubit import Z, expectation, inner, make_state_pair

CONSTRAINTS = "Constraints: 0<λ<1, 0<δ<1−λ, λ|a_w|≤1. Angles are in radians; 0 ≤ θ < π/2."

WEAK_VALUE_COLUMNS = ["theta", "a_w", "expectation_z", "overlap_sq"]
WEAK_VALUE_LAMBDA_COLUMNS = ["lambda", "a_w_conditioning"]
SIMULATE_COLUMNS = [
    "mode", "theta_or_delta", "lambda", "trials", "n_postselected", "postselection_rate",
    "a_w_exact", "a_w_estimate", "stderr", "seed",
]
METER_COLUMNS = [
    "theta", "x", "sigma", "lambda", "mean_shift_closed", "mean_shift_quadrature",
    "mean_over_x", "a_w_target", "abs_error",
]
SIM_EXTRA_COLUMNS = ["trials", "n_postselected", "a_w_estimate", "stderr", "seed"]


class UsageError(WeakValueError):
    pass


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise AssertionError("ragged CSV row")
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def note(msg):
    print(msg, file=sys.stderr)


def parse_range(text):
    """``lo:hi:steps`` -> (lo, hi, steps)."""
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"range must look like lo:hi:steps, got {text!r}") from None
    if steps < 2:
        raise UsageError("range needs steps >= 2")
    if not lo < hi:
        raise UsageError(f"range needs lo < hi, got {lo} and {hi}")
    return lo, hi, steps


def default_seed():
    env = os.environ.get("WEAKVAL_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"WEAKVAL_SEED must be an integer, got {env!r}") from None


def parse_postselect(text, mode):
    aliases = {"+1": 1, "1": 1, "-1": -1, "heads": 1, "tails": -1, "phi": 1, "perp": -1}
    if text is None:
        return coin.TAILS if mode == "classical" else 1
    try:
        return aliases[text.lower()]
    except KeyError:
        raise UsageError(f"unknown post-selection {text!r}") from None


# -- weak-value -----------------------------------------------------------------


def weak_value_report(theta, lam=None):
    pair = make_state_pair(theta)
    aw = analytic.weak_value(Z, pair.psi, pair.phi)
    header = list(WEAK_VALUE_COLUMNS)
    row = [theta, aw.real, expectation(Z, pair.psi), abs(inner(pair.phi, pair.psi)) ** 2]
    if lam is not None:
        setup = analytic.require_admissible(analytic.WeakSetup(Z, lam), pair.psi, pair.phi)
        header += WEAK_VALUE_LAMBDA_COLUMNS
        row += [lam, analytic.weak_value_via_conditioning(setup, pair.psi, pair.phi)]
    return header, [row]


def cmd_weak_value(args):
    header, rows = weak_value_report(args.theta, args.lam)
    note(f"a_w = 1/cos(theta) = {rows[0][1]:.12g}")
    return header, rows


# -- simulate -------------------------------------------------------------------


def simulate_row(result):
    cfg, est = result.config, result.estimate
    label = cfg.delta if cfg.mode == "classical" else cfg.theta
    return [
        cfg.mode, label, result.lam, cfg.trials, est.n_postselected, est.postselection_rate,
        result.a_w_exact, est.mean, est.stderr, cfg.seed,
    ]


def cmd_simulate(args):
    seed = default_seed() if args.seed is None else args.seed
    cfg = RunConfig(
        mode=args.mode,
        lam=args.lam,
        delta=args.delta,
        theta=args.theta,
        sigma=args.sigma,
        x=args.x,
        trials=args.trials,
        seed=seed,
        postselect=parse_postselect(args.postselect, args.mode),
        workers=args.workers,
        heads_prob=args.heads_prob,
    )
    result = run_simulation(cfg)
    est = result.estimate
    ok = abs(est.mean - result.a_w_exact) <= 3 * est.stderr
    note(
        f"a_w estimate {est.mean:.6g} ± {est.stderr:.3g} (exact {result.a_w_exact:.6g}, "
        f"{est.n_postselected}/{est.n_total} post-selected); "
        f"|estimate − exact| ≤ 3·stderr: {'yes' if ok else 'no'}"
    )
    return SIMULATE_COLUMNS, [simulate_row(result)]


# -- meter ----------------------------------------------------------------------


def meter_row(theta, x, sigma):
    m = GaussianMeter(sigma, x)
    pair = make_state_pair(theta)
    closed = postselected_mean_shift(m, pair.psi, pair.phi)
    quad = postselected_mean_shift_quadrature(m, pair.psi, pair.phi)
    target = analytic.weak_value(Z, pair.psi, pair.phi).real
    return [theta, x, sigma, m.lam, closed, quad, closed / x, target, abs(closed / x - target)]


def cmd_meter(args):
    if args.sweep_sigma is not None:
        lo, hi, steps = parse_range(args.sweep_sigma)
        if lo <= 0:
            raise UsageError("--sweep-sigma is geometric and needs lo > 0")
        sigmas = np.geomspace(lo, hi, steps)
    elif args.sigma is not None:
        sigmas = [args.sigma]
    else:
        raise UsageError("meter needs --sigma or --sweep-sigma")
    rows = [meter_row(args.theta, args.x, float(s)) for s in sorted(sigmas)]
    return METER_COLUMNS, rows


# -- sweep ----------------------------------------------------------------------


def _sweep_mode(args):
    if args.param == "delta":
        return "classical"
    if args.param == "theta":
        return "quantum"
    if args.param == "sigma":
        return "meter"
    if args.delta is not None and args.theta is None:
        return "classical"
    if args.theta is not None and args.delta is None:
        return "quantum"
    raise UsageError("a lambda sweep needs exactly one of --delta (coin) or --theta (qubit)")


def _bounds(args, mode):
    """Admissible interval for the swept parameter as (lo, lo_open, hi, hi_open)."""
    p = args.param
    if p == "delta":
        if args.lam is None:
            raise UsageError("a delta sweep needs --lambda")
        return 0.0, True, 1.0 - args.lam, True
    if p == "theta":
        return 0.0, False, math.pi / 2, True
    if p == "sigma":
        if args.x is None or args.theta is None:
            raise UsageError("a sigma sweep needs --x and --theta")
        return 2.0 * args.x / math.sqrt(2.0 * math.pi), True, math.inf, True
    if mode == "classical":
        return 0.0, True, 1.0 - args.delta, True
    pair = make_state_pair(args.theta)
    lam_max = analytic.max_admissible_lambda(Z, pair.psi, pair.phi)
    if lam_max >= 1.0:
        return 0.0, True, 1.0, True
    return 0.0, True, lam_max, False


def clipped_grid(lo, hi, steps, bounds):
    """Inclusive linear grid; endpoints outside the admissible interval are
    pulled inside by half a grid step. Returns ``(grid, notes)``."""
    b_lo, lo_open, b_hi, hi_open = bounds
    half = (hi - lo) / (steps - 1) / 2.0
    notes = []
    if lo < b_lo or (lo_open and lo == b_lo):
        new = b_lo + half if lo_open else b_lo
        notes.append(f"lower endpoint {lo:.12g} clipped to {new:.12g}")
        lo = new
    if hi > b_hi or (hi_open and hi == b_hi):
        new = b_hi - half if hi_open else b_hi
        notes.append(f"upper endpoint {hi:.12g} clipped to {new:.12g}")
        hi = new
    if not lo < hi:
        raise UsageError("range is empty after clipping to the admissible interval")
    return np.linspace(lo, hi, steps), notes


def sweep_report(args):
    """Raw (header, rows, notes) for a sweep; numbers are unformatted floats."""
    mode = _sweep_mode(args)
    lo, hi, steps = parse_range(args.range)
    grid, notes = clipped_grid(lo, hi, steps, _bounds(args, mode))
    simulate = args.trials is not None and mode != "meter"
    seed = (default_seed() if args.seed is None else args.seed) if simulate else None

    def point(v):
        vals = {"theta": args.theta, "lam": args.lam, "delta": args.delta, "sigma": args.sigma, "x": args.x}
        vals["lam" if args.param == "lambda" else args.param] = float(v)
        return vals

    # validate every grid point before computing anything
    for v in grid:
        p = point(v)
        try:
            if mode == "classical":
                coin.ClassicalModel(p["lam"], p["delta"])
            elif mode == "quantum":
                pair = make_state_pair(p["theta"])
                if p["lam"] is not None:
                    analytic.require_admissible(analytic.WeakSetup(Z, p["lam"]), pair.psi, pair.phi)
                elif simulate:
                    raise UsageError("simulating a qubit sweep needs --lambda")
            else:
                GaussianMeter(p["sigma"], p["x"])
                make_state_pair(p["theta"])
        except WeakValueError as exc:
            raise UsageError(f"invalid grid point {args.param}={v:.12g}: {exc}") from None

    rows = []
    if mode == "meter":
        for v in grid:
            rows.append(meter_row(args.theta, args.x, float(v)))
        return METER_COLUMNS, rows, notes

    if mode == "classical":
        header = ["param", "value", "lambda", "delta", "a_w_exact"]
    else:
        header = ["param", "value", "theta", "a_w_exact"]
        if args.lam is not None or args.param == "lambda":
            header += ["lambda", "a_w_conditioning"]
    if simulate:
        header += SIM_EXTRA_COLUMNS

    for v in grid:
        p = point(v)
        if mode == "classical":
            model = coin.ClassicalModel(p["lam"], p["delta"])
            row = [args.param, float(v), p["lam"], p["delta"], coin.exact_weak_value(model)]
        else:
            pair = make_state_pair(p["theta"])
            row = [args.param, float(v), p["theta"], analytic.weak_value(Z, pair.psi, pair.phi).real]
            if p["lam"] is not None:
                setup = analytic.WeakSetup(Z, p["lam"])
                row += [p["lam"], analytic.weak_value_via_conditioning(setup, pair.psi, pair.phi)]
        if simulate:
            cfg = RunConfig(
                mode=mode, lam=p["lam"], delta=p["delta"], theta=p["theta"], trials=args.trials,
                seed=seed, postselect=parse_postselect(args.postselect, mode),
                workers=args.workers, heads_prob=args.heads_prob,
            )
            res = run_simulation(cfg)
            row += [cfg.trials, res.estimate.n_postselected, res.estimate.mean, res.estimate.stderr, seed]
        rows.append(row)
    return header, rows, notes


def cmd_sweep(args):
    header, rows, notes = sweep_report(args)
    for n in notes:
        note(n)
    return header, rows


# -- parser ---------------------------------------------------------------------


def _seed(text):
    return int(text, 0)


def _add_sim_flags(p, trials_default):
    p.add_argument("--trials", type=int, default=trials_default, help="number of simulated trials")
    p.add_argument("--seed", type=_seed, default=None,
                   help=f"64-bit master seed (default: $WEAKVAL_SEED, else {DEFAULT_SEED})")
    p.add_argument("--postselect", default=None,
                   help="kept outcome: heads|tails for the coin (default tails), phi|perp for the qubit (default phi)")
    p.add_argument("--workers", type=int, default=1, help="worker threads; results do not depend on it")
    p.add_argument("--heads-prob", type=float, default=DEFAULT_HEADS_PROB,
                   help="probability that Alice's toss lands Heads (default 1, i.e. always pre-selected)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weakval", description="Weak values of a qubit and of a disturbed classical coin.", epilog=CONSTRAINTS
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=f"{help_text} {CONSTRAINTS}", epilog=CONSTRAINTS)

    p = add("weak-value", "Closed-form weak value of Z for the theta state pair.")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="also report E[s/λ|φ,ψ]; requires λ|a_w|≤1")
    p.set_defaults(func=cmd_weak_value)

    p = add("simulate", "Monte Carlo estimate of E[s/λ | post-selection].")
    p.add_argument("--mode", choices=["classical", "quantum", "meter"], required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None, help="meter mode: pointer width")
    p.add_argument("--x", type=float, default=None, help="meter mode: coupling times duration")
    _add_sim_flags(p, 1_000_000)
    p.set_defaults(func=cmd_simulate)

    p = add("meter", "Post-selected pointer shift of the Gaussian meter.")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--sigma", type=float)
    grp.add_argument("--sweep-sigma", metavar="LO:HI:STEPS", help="geometrically spaced sigma values")
    p.set_defaults(func=cmd_meter)

    p = add("sweep", "Tabulate weak values over a linear parameter grid.")
    p.add_argument("--param", choices=["theta", "lambda", "delta", "sigma"], required=True)
    p.add_argument("--range", required=True, metavar="LO:HI:STEPS",
                   help="inclusive grid; endpoints on an open boundary are moved in by half a step")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--x", type=float, default=None)
    _add_sim_flags(p, None)
    p.set_defaults(func=cmd_sweep)

    for p in sub.choices.values():
        p.add_argument("--out", default=None, help="write the CSV here instead of standard output")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        header, rows = args.func(args)
        text = render_csv(header, rows)
    except InsufficientPostselection as exc:
        note(f"error: {exc}")
        return 3
    except WeakValueError as exc:
        note(f"error: {exc}")
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
