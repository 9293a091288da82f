"""Command-line interface.

Subcommands: preset (emit a bundled scenario config), simulate (run any
scenario), sweep (run a sweep-kind scenario), spectrum (transform a stored
series), fit-tau (exponential fit of a thermalization-time table).

Exit codes: 0 success, 2 configuration or validation error, 3 I/O error,
1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bundle import (BundleError, atomic_write_text, read_table, sanitize_json,
                     table_text)
from .config import ConfigError, SWEEP_KINDS, parse_config
from .experiments import run_scenario
from .fitting import log_linear_fit
from .presets import preset_config_text, preset_names, preset_spec
from .spectral import crystalline_fraction, dtft, peak_frequency

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-dtc",
        description="Classical driven spin-chain simulator and analysis toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("preset", help="emit a bundled scenario config")
    pre.add_argument("name", choices=preset_names())
    pre.add_argument("-o", "--out", default=None, help="file to write (default stdout)")

    for cmd, help_text in (("simulate", "run a scenario config"),
                           ("sweep", "run a sweep-kind scenario config")):
        run = sub.add_parser(cmd, help=help_text)
        run.add_argument("config", nargs="?", default=None,
                         help="scenario config file")
        run.add_argument("--preset", default=None, choices=preset_names(),
                         help="run a bundled preset instead of a config file")
        run.add_argument("--out", default=None, help="bundle output directory")
        run.add_argument("--seed", type=int, default=None, help="override master seed")
        run.add_argument("--realizations", type=int, default=None)
        run.add_argument("--horizon", type=int, default=None, help="horizon in drive periods")
        run.add_argument("--threads", type=int, default=None,
                         help="worker pool size for grid points "
                              "(env FLOQUET_DTC_THREADS overrides the default)")
        strict = run.add_mutually_exclusive_group()
        strict.add_argument("--strict-config", dest="strict", action="store_true",
                            default=True, help="reject unknown config keys (default)")
        strict.add_argument("--no-strict-config", dest="strict", action="store_false",
                            help="ignore unknown config keys")

    spec_cmd = sub.add_parser("spectrum", help="transform a per-period series file")
    spec_cmd.add_argument("series", help="columnar series file")
    spec_cmd.add_argument("--column", default=None,
                          help="column to transform (default: mz if present, else first)")
    spec_cmd.add_argument("--window", type=int, default=500,
                          help="number of leading samples to transform")
    spec_cmd.add_argument("--grid-spacing", type=float, default=1e-3)
    spec_cmd.add_argument("--include-dc", action="store_true",
                          help="let the zero-frequency bin win the peak search")
    spec_cmd.add_argument("--raw", action="store_true",
                          help="transform the rows as-is; by default files with "
                               "an 'm' column are decimated to period boundaries")
    spec_cmd.add_argument("--out", default=None, help="write the spectrum table here")

    fit_cmd = sub.add_parser("fit-tau", help="fit log(tau) = c*omega + b from a table")
    fit_cmd.add_argument("table", help="columnar file with omega and tau columns")
    fit_cmd.add_argument("--out", default=None, help="write the fit summary JSON here")

    return parser


def _cmd_preset(args) -> int:
    text = preset_config_text(args.name)
    if args.out:
        atomic_write_text(Path(args.out), text)
        print(f"wrote preset {args.name} to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_run(args, sweep_only: bool) -> int:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("give exactly one of a config file or --preset <name>")
    if args.preset is not None:
        spec = preset_spec(args.preset)
    else:
        spec = parse_config(args.config, strict=args.strict)
    if sweep_only and spec.scenario not in SWEEP_KINDS:
        raise ConfigError(
            f"scenario: {spec.scenario!r} is not a sweep kind; use `simulate` "
            f"(sweep kinds: {', '.join(SWEEP_KINDS)})")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    if args.horizon is not None:
        overrides["horizon_periods"] = args.horizon
    if overrides:
        spec = replace(spec, **overrides)
    out_dir = args.out or spec.out_dir
    if out_dir is None:
        raise ConfigError("out_dir: no output directory (set out_dir or pass --out)")
    summary = run_scenario(spec, out_dir, threads=args.threads)
    n_points = len(summary.get("points", []))
    errors = [p for p in summary["points"] if "error" in p]
    print(f"scenario {spec.scenario}: {n_points} point(s) -> {out_dir}")
    for p in errors:
        print(f"  point {p['point']} failed: {p['error']}", file=sys.stderr)
    return EXIT_OK if not errors else EXIT_UNEXPECTED


def _series_column(table: dict, column: str | None, path: str) -> np.ndarray:
    names = list(table)
    if column is None:
        column = "mz" if "mz" in table else names[0]
    if column not in table:
        raise BundleError(f"{path}: no column {column!r} (have: {', '.join(names)})")
    values = table[column]
    if values.dtype == object:
        raise BundleError(f"{path}: column {column!r} is not numeric")
    return values


def _cmd_spectrum(args) -> int:
    table = read_table(args.series)
    series = _series_column(table, args.column, args.series)
    if not args.raw and "m" in table and table["m"].dtype != object:
        series = series[table["m"] % 2 == 0]  # keep period-boundary samples
    series = series[~np.isnan(series)]
    window = min(args.window, series.size)
    spectrum = dtft(series[:window], args.grid_spacing)
    exclude_dc = not args.include_dc
    peak = peak_frequency(spectrum, exclude_dc=exclude_dc)
    f = crystalline_fraction(spectrum, exclude_dc=exclude_dc)
    print(f"samples: {window}")
    print(f"peak frequency: {peak:.6f} rad/period")
    print(f"crystalline fraction: {f:.6f}")
    if args.out:
        atomic_write_text(Path(args.out), table_text(
            ["omega", "re", "im", "power"],
            [spectrum.frequencies, spectrum.amplitudes.real,
             spectrum.amplitudes.imag, spectrum.power]))
        print(f"wrote spectrum to {args.out}")
    return EXIT_OK


def _cmd_fit_tau(args) -> int:
    table = read_table(args.table)
    names = list(table)
    if "omega_over_pi" in table:
        omega = table["omega_over_pi"] * np.pi
    elif "omega" in table:
        omega = table["omega"]
    else:
        omega = table[names[0]]
    for tau_key in ("tau_mean_periods", "tau_star_periods", "tau", "tau_star"):
        if tau_key in table:
            tau = table[tau_key]
            break
    else:
        if len(names) < 2:
            raise BundleError(f"{args.table}: need omega and tau columns")
        tau = table[names[1]]
    ok = np.isfinite(omega) & np.isfinite(tau) & (tau > 0)
    fit = log_linear_fit(omega[ok], tau[ok])
    payload = {"slope": fit.slope, "intercept": fit.intercept,
               "r_squared": fit.r_squared, "n_points": fit.n_points}
    print(f"log(tau) = {fit.slope:.4f} * omega + {fit.intercept:.4f}   "
          f"(R^2 = {fit.r_squared:.4f}, n = {fit.n_points})")
    if args.out:
        atomic_write_text(Path(args.out),
                          json.dumps(sanitize_json(payload), indent=2, sort_keys=True) + "\n")
        print(f"wrote fit summary to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "preset":
            return _cmd_preset(args)
        if args.command == "simulate":
            return _cmd_run(args, sweep_only=False)
        if args.command == "sweep":
            return _cmd_run(args, sweep_only=True)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "fit-tau":
            return _cmd_fit_tau(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BundleError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - last resort diagnostics
        print(f"unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
