"""Command line entry point: ``pingpong-sim analyze | simulate | sweep``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from typing import List, Optional

from . import analytics
from .config import ConfigError, ExperimentConfig, load_config, parse_message
from .channel import NoiseKind
from .harness import (SWEEP_PARAMS, result_row, round_rows, run_experiment, summary_text,
                      sweep, write_csv)
from .protocol import ProtocolVariant


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of standard output")
    p.add_argument("--csv", dest="csv", action="store_true", default=True, help="emit CSV (default)")
    p.add_argument("--no-csv", dest="csv", action="store_false", help="print the summary only")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value experiment file")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--rounds", type=int)
    p.add_argument("--c", type=float, help="probability of control mode")
    p.add_argument("--eps-c", dest="eps_c", type=float, help="channel error rate in sigma_z checks")
    p.add_argument("--noise", dest="noise_kind", choices=[k.value for k in NoiseKind])
    p.add_argument("--loss", dest="loss_prob", type=float, help="per-leg loss probability")
    p.add_argument("--variant", choices=[v.value for v in ProtocolVariant])
    p.add_argument("--attack", choices=["none", "intercept", "pns"])
    p.add_argument("--photons", dest="n_photons", type=int, help="photons per fake pulse")
    p.add_argument("--theta", type=float, help="fake-signal angle in radians (default: from eps_c)")
    p.add_argument("--emulate-baseline", dest="emulate_baseline", action="store_true", default=None)
    p.add_argument("--no-emulate-baseline", dest="emulate_baseline", action="store_false")
    p.add_argument("--no-dead-time", dest="dead_time", action="store_false", default=None)
    p.add_argument("--message", help="'random' or a bit pattern such as 0110")
    p.add_argument("--theta-check", dest="theta_check", choices=["warn", "error", "off"])
    p.add_argument("--scenario", help="scenario id written to the CSV")
    p.add_argument("--log", metavar="PATH", help="write the per-round log as CSV")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    _add_output_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pingpong-sim", description="Fake-signal attack on the ping-pong protocol")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    an = sub.add_parser("analyze", help="closed-form table")
    an.add_argument("--eps-c", dest="eps_c", type=_float_list, default=None,
                    help="comma-separated channel error rates (theta from sin^2 theta = eps_c)")
    an.add_argument("--theta", type=_float_list, default=None, help="comma-separated angles in radians")
    an.add_argument("--photons", type=_int_list, default=[4], help="comma-separated pulse sizes")
    _add_output_flags(an)

    sim = sub.add_parser("simulate", help="run one Monte Carlo experiment")
    _add_experiment_flags(sim)

    sw = sub.add_parser("sweep", help="repeat an experiment over a parameter grid")
    _add_experiment_flags(sw)
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sw.add_argument("--values", required=True, type=_float_list)
    return parser


_FLAG_FIELDS = ("seed", "rounds", "c", "eps_c", "noise_kind", "loss_prob", "variant", "attack",
                "n_photons", "theta", "emulate_baseline", "dead_time", "message", "theta_check",
                "scenario")


def config_from_args(args) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        config = load_config(args.config, config)
    changes = {}
    for name in _FLAG_FIELDS:
        value = getattr(args, name, None)
        if value is None:
            continue
        if name == "noise_kind":
            value = NoiseKind(value)
        elif name == "variant":
            value = ProtocolVariant(value)
        elif name == "message":
            value = parse_message(value)
        changes[name] = value
    if args.log:
        changes["per_round_log"] = True
    config = config.replace(**changes)
    if config.per_round_log and not args.log:
        raise ConfigError("per_round_log needs --log PATH")
    return config.validate()


def analyze_rows(eps_values, theta_values, photons) -> List[dict]:
    points = []
    for eps in eps_values or []:
        points.append((eps, analytics.theta_for_noise(eps)))
    for theta in theta_values or []:
        points.append(("", theta))
    if not points:
        points.append((0.1, analytics.theta_for_noise(0.1)))
    rows = []
    for eps, theta in points:
        for n in photons:
            pf = analytics.p_fail(theta, n)
            rows.append({
                "eps_c": eps,
                "theta": theta,
                "epsilon_e": analytics.epsilon_e(theta),
                "n_photons": n,
                "coded_overlap": analytics.coded_overlap(theta),
                "p_fail": pf,
                "eve_accuracy": analytics.eve_accuracy(pf),
                "eve_info_bits": analytics.eve_info_bits(pf),
                "improved_detection_rate": analytics.improved_detection_rate(theta),
            })
    return rows


def _emit(rows, args, summary: str) -> None:
    if args.csv and args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        print(summary)
    elif args.csv:
        write_csv(rows, sys.stdout)
        print(summary, file=sys.stderr)
    else:
        print(summary)


def _analyze(args) -> None:
    for n in args.photons:
        if n < 1:
            raise ConfigError("photon counts must be >= 1")
    try:
        rows = analyze_rows(args.eps_c, args.theta, args.photons)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    summary = "\n".join(
        f"theta={r['theta']:.6f} sin^2={r['epsilon_e']:.6g} N={r['n_photons']}: "
        f"P_F={r['p_fail']:.6g} accuracy={r['eve_accuracy']:.6g} info={r['eve_info_bits']:.6g} bits"
        for r in rows)
    _emit(rows, args, summary)


def _simulate(args) -> None:
    config = config_from_args(args)
    result = run_experiment(config, workers=args.workers)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="") as fh:
            write_csv(round_rows(result.records), fh)
    _emit([result_row(result)], args, summary_text(result))


def _sweep(args) -> None:
    config = config_from_args(args)
    rows = sweep(config, args.param, args.values, workers=args.workers)
    summary = "\n".join(
        f"{args.param}={v}: mismatch={r['control_mismatch_rate']:.6g} "
        f"(pred {r['pred_control_mismatch_rate']:.6g}) eve_fail={r['eve_fail_rate']:.6g} "
        f"(pred {r['pred_eve_fail_rate']:.6g})"
        for v, r in zip(args.values, rows))
    _emit(rows, args, summary)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    handlers = {"analyze": _analyze, "simulate": _simulate, "sweep": _sweep}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
