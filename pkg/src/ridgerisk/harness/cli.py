"""Command-line interface.

Subcommands: ``sweep`` (one scenario over a ridge grid), ``approx``
(deterministic equivalents vs exact risk), ``fig1``/``fig2`` (the two
numerical studies), ``check`` (oracle cross-check suites), and
``thresholds`` (spike-gap threshold table).  Every preset value can be
overridden by flags; ``--config`` points at a key=value file and the
environment variable ``RIDGE_RISK_SEED`` overrides the file's seed.
"""

from __future__ import annotations

import argparse
import sys

from ..detequiv import dn_condition_thresholds
from ..spectrum import ter_metrics
from .checks import DEFAULT_TOLERANCES, run_checks
from .config import ExperimentConfig, resolve_config
from .emit import emit_approx_csv, emit_check_csv, emit_csv, emit_plot, format_float
from .presets import build_spectrum
from .runner import run_approx, run_fig1, run_fig2, run_sweep

_SWEEP_DEFAULTS = {"d": 5, "n": 500, "p": 500, "rho": 0.05}


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--n", type=int)
    sub.add_argument("--p", type=int)
    sub.add_argument("--d", type=int)
    sub.add_argument("--rho", type=float)
    sub.add_argument("--sigma2", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--tau-min", dest="tau_min", type=float)
    sub.add_argument("--tau-max", dest="tau_max", type=float)
    sub.add_argument("--tau-count", dest="tau_count", type=int)
    sub.add_argument("--tau-scale", dest="tau_scale", choices=("log", "linear"))
    sub.add_argument("--replicates", type=int)
    sub.add_argument("--threads", type=int)
    sub.add_argument("--multipliers", type=str)
    sub.add_argument("--pattern", choices=("two_level", "three_level"))
    sub.add_argument("--mid-multiplier", dest="mid_multiplier", type=int)
    sub.add_argument("--tail-factor", dest="tail_factor", type=float)
    sub.add_argument("--out", help="CSV output path")
    sub.add_argument("--plot", help="vector plot output path (.svg or .pdf)")
    sub.add_argument("--debug-replicates", dest="debug_replicates", help="directory for per-replicate CSVs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridgerisk",
        description="Exact ridge prediction risks, deterministic equivalents, and experiment reproduction",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("sweep", "sweep one scenario over a ridge grid and emit a CSV"),
        ("approx", "compare deterministic equivalents against exact risk"),
        ("fig1", "threshold study with multipliers around a corollary preset"),
        ("fig2", "optimal in-sample vs out-sample risk gap study"),
        ("thresholds", "print the spike-gap threshold table"),
        ("check", "run the oracle cross-check suites"),
    ):
        sub = subs.add_parser(name, help=help_text)
        if name == "fig1":
            sub.add_argument(
                "--corollary", required=True, choices=("c1", "c2", "c3a", "c3b", "c4")
            )
        if name == "fig2":
            sub.add_argument("--setting", required=True, choices=("i", "ii", "iii"))
        if name == "check":
            sub.add_argument(
                "--tolerance",
                action="append",
                default=[],
                metavar="SUITE=VALUE",
                help=f"override a suite tolerance; suites: {', '.join(DEFAULT_TOLERANCES)}",
            )
        _add_common_flags(sub)
    return parser


def _config_from_args(args: argparse.Namespace, preset_section: str | None = None) -> ExperimentConfig:
    flags = {
        key: getattr(args, key, None)
        for key in (
            "d", "n", "p", "rho", "sigma2", "seed",
            "tau_min", "tau_max", "tau_count", "tau_scale",
            "replicates", "threads", "pattern", "mid_multiplier", "tail_factor",
            "out", "plot", "debug_replicates",
        )
    }
    if getattr(args, "multipliers", None) is not None:
        from .config import parse_multipliers

        flags["multipliers"] = parse_multipliers(args.multipliers)
    return resolve_config(flags, config_path=getattr(args, "config", None), preset_section=preset_section)


def _emit_table(table, config: ExperimentConfig, default_name: str) -> str:
    path = config.out if config.out else default_name
    emit_csv(table, path)
    if config.plot:
        emit_plot(table, config.plot)
    return path


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "sweep":
        config = _config_from_args(args)
        config = config.with_overrides(
            **{k: v for k, v in _SWEEP_DEFAULTS.items() if getattr(config, k) is None}
        )
        table = run_sweep(config)
        path = _emit_table(table, config, "sweep.csv")
        print(f"wrote {path}")
        return 0

    if args.command == "approx":
        config = _config_from_args(args)
        config = config.with_overrides(
            **{k: v for k, v in _SWEEP_DEFAULTS.items() if getattr(config, k) is None}
        )
        rows, metadata = run_approx(config)
        path = config.out if config.out else "approx.csv"
        emit_approx_csv(rows, metadata, path)
        print(f"wrote {path}")
        return 0

    if args.command == "fig1":
        config = _config_from_args(args, preset_section=f"fig1.{args.corollary}")
        table = run_fig1(config, args.corollary)
        path = _emit_table(table, config, f"fig1_{args.corollary}.csv")
        print(f"wrote {path}")
        return 0

    if args.command == "fig2":
        config = _config_from_args(args, preset_section=f"fig2.{args.setting}")
        table = run_fig2(config, args.setting)
        path = _emit_table(table, config, f"fig2_{args.setting}.csv")
        print(f"wrote {path}")
        return 0

    if args.command == "thresholds":
        config = _config_from_args(args)
        config = config.with_overrides(
            **{k: v for k, v in _SWEEP_DEFAULTS.items() if getattr(config, k) is None}
        )
        spec = build_spectrum(config, config.d, config.p, config.rho)
        metrics = ter_metrics(spec, config.n)
        th = dn_condition_thresholds(spec, config.n)
        print(f"d = {config.d}, n = {config.n}, p = {config.p}, rho = {config.rho:g}")
        print(f"r_d(Sigma)   = {format_float(metrics.r_d_sigma)}")
        print(f"r_d(Sigma^2) = {format_float(metrics.r_d_sigma_sq)}")
        print(f"regime       = {metrics.regime.value}")
        for label, value in (
            ("out-sample, small/moderate", th.out_small),
            ("in-sample,  small/moderate", th.in_small),
            ("out-sample, large", th.out_large),
            ("in-sample,  large", th.in_large),
        ):
            print(f"threshold {label}: {format_float(value)}")
        print(f"cor3 discriminant: {format_float(th.cor3_discriminant)}")
        for label, window in (
            ("out small", th.window_out_small),
            ("in small", th.window_in_small),
            ("out large", th.window_out_large),
            ("in large", th.window_in_large),
        ):
            print(f"tau window {label}: [{format_float(window[0])}, {format_float(window[1])}]")
        return 0

    if args.command == "check":
        config = _config_from_args(args)
        overrides: dict[str, float] = {}
        for item in args.tolerance:
            suite, _, value = item.partition("=")
            if not value:
                raise SystemExit(f"bad --tolerance value: {item!r} (expected SUITE=VALUE)")
            overrides[suite] = float(value)
        report = run_checks(seed=config.seed, tolerances=overrides or None)
        for result in report.results:
            status = "PASS" if result.passed else "FAIL"
            print(
                f"[{status}] {result.suite}: measured {result.measured:.3e}"
                f" vs tolerance {result.tolerance:.3e}"
            )
        if config.out:
            emit_check_csv(report, config.out)
            print(f"wrote {config.out}")
        return 0 if report.all_passed else 1

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
