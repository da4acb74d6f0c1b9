"""Command-line front end.

    decaysum coeffs --decay poly:1 --n 2048
    decaysum bounds --decay exp:2 --T 64
    decaysum run --decay poly:1 --input stream.txt --seed 7
    decaysum bench --decays poly:1,exp:2 --T 256,1024 --trials 200 --seed 7

CSV numbers are written with 17 significant digits. Exit codes: 0 success,
1 runtime/numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import bounds
from .decay import parse_decay, read_values
from .errors import ConfigError, DecaySumError, DomainError
from .evaluation import (
    DISTRIBUTIONS,
    ErrorReport,
    coefficient_gaps,
    comparison_report,
    draw_stream,
    run_error_experiment,
    trial_seeds,
    true_decaying_sums,
)
from .mechanisms import MECHANISMS, SIGMA_CONVENTIONS, PrivacyParams, make_mechanism

log = logging.getLogger("decaysum")

COEFF_HEADER = ["n", "a_n", "half_f_next", "gap"]
RUN_HEADER = ["t", "x", "private_output"]


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _int_list(s):
    return [int(v) for v in s.split(",") if v]


def _str_list(s):
    return [v.strip() for v in s.split(",") if v.strip()]


def _add_privacy(p):
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-5)
    p.add_argument("--clip", type=float, default=1.0, help="bound on |x_t|")
    p.add_argument("--sigma-convention", choices=SIGMA_CONVENTIONS, default="main-text")
    p.add_argument("--unsafe-no-privacy", action="store_true", help="zero noise; testing only")
    p.add_argument("--seed", type=int, default=None, help="required unless --unsafe-no-privacy")


def _privacy(args) -> PrivacyParams:
    if args.seed is None and not args.unsafe_no_privacy:
        raise ConfigError("--seed is mandatory for noisy commands")
    return PrivacyParams(args.epsilon, args.delta, args.clip, args.sigma_convention, args.unsafe_no_privacy)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decaysum", description="Private continual decaying sums.")
    parser.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="square-root coefficients and their halving estimate")
    p.add_argument("--decay", required=True)
    p.add_argument("--n", type=int, required=True, help="largest index N (writes N+1 rows)")

    p = sub.add_parser("bounds", help="gamma_2 / gamma_F bounds as JSON")
    p.add_argument("--decay", required=True)
    p.add_argument("--T", type=int, required=True)

    p = sub.add_parser("run", help="run a mechanism over a stream")
    p.add_argument("--decay", required=True)
    p.add_argument("--mechanism", choices=MECHANISMS, default="factorization")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="file with one value per line ('-' for stdin)")
    src.add_argument("--dist", choices=DISTRIBUTIONS, help="synthetic stream (needs --T)")
    p.add_argument("--T", type=int)
    _add_privacy(p)

    p = sub.add_parser("bench", help="Monte Carlo error table over a grid")
    p.add_argument("--mechanisms", type=_str_list, default=["factorization", "gaussian"])
    p.add_argument("--decays", type=_str_list, required=True)
    p.add_argument("--T", type=_int_list, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default="zeros")
    p.add_argument("--jobs", type=int, default=1)
    _add_privacy(p)
    return parser


def cmd_coeffs(args, out):
    f = parse_decay(args.decay)
    if args.n < 0:
        raise ConfigError("--n must be non-negative")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COEFF_HEADER)
    for row in coefficient_gaps(f, args.n):
        w.writerow([row.n, fmt(row.coeff), fmt(row.estimate), fmt(row.gap)])


def bounds_payload(f, T: int) -> dict:
    if T < 1:
        raise ConfigError("--T must be >= 1")
    nb = bounds.norm_bounds(f, T)
    payload = {
        "decay": f.describe(),
        "T": T,
        "gamma2_lower": nb.gamma2_lower,
        "gamma2_upper": nb.gamma2_upper,
        "gammaF_upper": nb.gammaF_upper,
        "closed_form": None,
        "baseline": nb.baseline_gamma2,
        "gaussian_sensitivity": bounds.gaussian_sensitivity(f, T),
    }
    try:
        payload["closed_form"] = bounds.closed_form_upper(f, T)
        report = comparison_report(f, T)
        payload["orderings"] = {c.claim: c.passed for c in report.checks}
    except DomainError:
        pass
    return payload


def cmd_bounds(args, out):
    out.write(json.dumps(bounds_payload(parse_decay(args.decay), args.T), indent=2))
    out.write("\n")


def _load_stream(args) -> np.ndarray:
    if args.input is not None:
        if args.input == "-":
            lines = sys.stdin.read().splitlines()
        else:
            try:
                with open(args.input, encoding="utf-8") as fh:
                    lines = fh.read().splitlines()
            except OSError as exc:
                raise ConfigError(f"cannot read stream: {exc}") from exc
        try:
            x = np.array(read_values(lines), dtype=float)
        except ValueError as exc:
            raise ConfigError(f"bad stream value: {exc}") from exc
        if args.T is not None and args.T != x.size:
            raise ConfigError(f"--T {args.T} does not match stream length {x.size}")
        return x
    if args.T is None:
        raise ConfigError("--dist needs --T")
    stream_seed, _ = trial_seeds(args.seed or 0, 0)
    return draw_stream(args.dist, args.T, args.clip, np.random.default_rng(stream_seed))


def cmd_run(args, out):
    f = parse_decay(args.decay)
    privacy = _privacy(args)
    x = _load_stream(args)
    if x.size == 0:
        raise ConfigError("empty stream")
    seed = args.seed if args.seed is not None else 0
    mech = make_mechanism(args.mechanism, f, x.size, privacy, seed)
    outputs = [mech.step(v) for v in x]
    if mech.clip_events:
        print(f"warning: {mech.clip_events} value(s) clamped to [-{args.clip}, {args.clip}]", file=sys.stderr)
    w = csv.writer(out, lineterminator="\n")
    header = RUN_HEADER + (["true_sum"] if privacy.unsafe_no_privacy else [])
    w.writerow(header)
    truth = true_decaying_sums(f, np.clip(x, -args.clip, args.clip)) if privacy.unsafe_no_privacy else None
    for t, (xv, yv) in enumerate(zip(x, outputs), start=1):
        row = [t, fmt(float(xv)), fmt(yv)]
        if truth is not None:
            row.append(fmt(float(truth[t - 1])))
        w.writerow(row)


def cmd_bench(args, out):
    privacy = _privacy(args)
    for m in args.mechanisms:
        if m not in MECHANISMS:
            raise ConfigError(f"unknown mechanism {m!r}")
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    decays = [parse_decay(d) for d in args.decays]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ErrorReport.CSV_FIELDS)
    seed = args.seed if args.seed is not None else 0
    for mech in args.mechanisms:
        for f in decays:
            if mech == "window" and not f.is_window:
                continue
            for T in args.T:
                rep = run_error_experiment(mech, f, T, privacy, args.trials, args.dist, seed, workers=args.jobs)
                w.writerow([fmt(v) for v in rep.row()])


COMMANDS = {"coeffs": cmd_coeffs, "bounds": cmd_bounds, "run": cmd_run, "bench": cmd_bench}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DecaySumError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = buf.getvalue()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
