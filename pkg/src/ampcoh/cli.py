"""Command line interface for the benchmark harness.

Subcommands: detect, estimate, scaling, noise-sweep, verify.  Options can
also come from a plain key=value config file (--config); explicit flags
override file values.  Exit status: 0 success, 1 config error, 2 failed
verification under `verify`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bench import (
    DEFAULT_C_GRID,
    DEFAULT_P_ERR_GRID,
    BenchResult,
    ConfigError,
    ExperimentConfig,
    run,
    run_rows,
    summarize,
    verify_formulas,
    write_csv,
)


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors must exit 1
        raise _CliError(message)


def _parse_grid(text: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError as exc:
        raise _CliError(f"bad grid value in {text!r}: {exc}") from exc
    if not values:
        raise _CliError(f"empty grid: {text!r}")
    return values


_OPTION_KEYS = (
    "d",
    "c-grid",
    "delta",
    "epsilon",
    "trials",
    "seed",
    "budget",
    "out",
    "p-err-grid",
    "channel",
    "workers",
)


def _add_common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--d", type=int, default=None, help="system dimension (2..64)")
    sub.add_argument("--c-grid", type=str, default=None, help="comma-separated coherence values")
    sub.add_argument("--delta", type=float, default=None, help="target failure probability")
    sub.add_argument("--epsilon", type=float, default=None, help="target additive estimation error")
    sub.add_argument("--trials", type=int, default=None, help="trials per grid cell")
    sub.add_argument("--seed", type=int, default=None, help="root seed")
    sub.add_argument("--budget", type=int, default=None, help="max oracle calls per trial")
    sub.add_argument("--out", type=str, default=None, help="output CSV path")
    sub.add_argument("--p-err-grid", type=str, default=None, help="comma-separated noise rates")
    sub.add_argument("--channel", type=str, default=None, help="noise channel name")
    sub.add_argument("--workers", type=int, default=None, help="worker processes (default 1)")
    sub.add_argument("--config", type=str, default=None, help="key=value config file; flags win")


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise _CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in _OPTION_KEYS:
                    raise _CliError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = val.strip()
    except OSError as exc:
        raise _CliError(f"cannot read config file {path}: {exc}") from exc
    return values


_INT_KEYS = {"d", "trials", "seed", "budget", "workers"}
_FLOAT_KEYS = {"delta", "epsilon"}
_GRID_KEYS = {"c-grid", "p-err-grid"}


def _coerce(key: str, val: str):
    try:
        if key in _INT_KEYS:
            return int(val)
        if key in _FLOAT_KEYS:
            return float(val)
        if key in _GRID_KEYS:
            return _parse_grid(val)
    except ValueError as exc:
        raise _CliError(f"bad value for {key}: {val!r}") from exc
    return val


def _merge_options(args: argparse.Namespace, defaults: dict) -> dict:
    merged = dict(defaults)
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            merged[key.replace("-", "_")] = _coerce(key, raw)
    flag_map = {
        "d": args.d,
        "c_grid": _parse_grid(args.c_grid) if args.c_grid else None,
        "delta": args.delta,
        "epsilon": args.epsilon,
        "trials": args.trials,
        "seed": args.seed,
        "budget": args.budget,
        "out": args.out,
        "p_err_grid": _parse_grid(args.p_err_grid) if args.p_err_grid else None,
        "channel": args.channel,
        "workers": args.workers,
    }
    for key, val in flag_map.items():
        if val is not None:
            merged[key] = val
    return merged


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ampcoh", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("detect", "amplified coherence detection trials"),
        ("estimate", "phase-estimation coherence estimates"),
        ("scaling", "baseline and amplified scaling benchmark (one CSV)"),
        ("noise-sweep", "detection success under per-call noise"),
        ("verify", "closed-form identity suites"),
    ):
        sub = subs.add_parser(name, help=helptext)
        _add_common_options(sub)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            checks = verify_formulas(seed=args.seed if args.seed is not None else 20260811)
            ok = True
            for name, passed, detail in checks:
                print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
                ok = ok and passed
            return 0 if ok else 2

        if args.command == "detect":
            opts = _merge_options(args, {"c_grid": (0.25,)})
            cfg = ExperimentConfig(experiment="amplified-scaling", **opts)
            result = run(cfg)
        elif args.command == "estimate":
            opts = _merge_options(args, {"c_grid": (0.25,), "trials": 50})
            cfg = ExperimentConfig(experiment="estimation-scaling", **opts)
            result = run(cfg)
        elif args.command == "noise-sweep":
            opts = _merge_options(args, {"c_grid": (0.01, 0.04, 0.16), "trials": 300, "budget": 10_000})
            cfg = ExperimentConfig(experiment="noise-sweep", **opts)
            result = run(cfg)
        elif args.command == "scaling":
            opts = _merge_options(args, {"c_grid": DEFAULT_C_GRID})
            out = opts.pop("out", None) or "scaling.csv"
            cfg_base = ExperimentConfig(experiment="baseline-scaling", **opts)
            cfg_amp = replace(cfg_base, experiment="amplified-scaling")
            rows = run_rows(cfg_base) + run_rows(cfg_amp)
            write_csv(out, rows)
            summary = summarize(cfg_base, [r for r in rows if r.experiment == "baseline-scaling"])
            summary += "\n" + summarize(cfg_amp, [r for r in rows if r.experiment == "amplified-scaling"])
            result = BenchResult(rows=rows, summary=summary, csv_path=out)
        else:  # pragma: no cover - argparse enforces the choices
            raise _CliError(f"unknown command {args.command!r}")

        print(result.summary)
        print(f"wrote {len(result.rows)} rows to {result.csv_path}")
        return 0
    except (_CliError, ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
