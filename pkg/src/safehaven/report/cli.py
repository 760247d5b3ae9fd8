"""Command-line interface.

``safehaven run --config FILE``
    Run the full pipeline and write every output file.
``safehaven simulate --preset garch|dcc --seed N --out FILE``
    Write a simulated return (or price) CSV usable as pipeline input.
``safehaven test-series --file FILE``
    Unit-root and heteroskedasticity tests for a single series.

Exit codes: 0 success, 1 configuration or input error, 2 every pair failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..dcc import DccParams, simulate_dcc
from ..errors import AllPairsFailed, ConfigError, SafeHavenError
from ..garch import GarchParams, simulate_garch11
from ..ingest import PriceSeries, describe, load_series, log_returns
from ..stationarity import adf_test, pp_test
from .config import load_config
from .pipeline import run_pipeline, series_diagnostics, write_outputs

__all__ = ["main", "build_parser", "PRESETS"]

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 1, 2

PRESETS = {
    "garch": {"garch": GarchParams(0.0, 0.1, 0.1, 0.85)},
    "dcc": {
        "garch_a": GarchParams(0.0, 0.1, 0.1, 0.85),
        "garch_b": GarchParams(0.0, 0.05, 0.08, 0.90),
        "dcc": DccParams(0.05, 0.90),
        "q_bar": 0.5,
    },
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="safehaven", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--output-dir", type=Path, help="override the configured output directory")

    sim = sub.add_parser("simulate", help="write a simulated series")
    sim.add_argument("--preset", choices=sorted(PRESETS), required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", type=Path, required=True)
    sim.add_argument("--n", type=int, default=2000, help="number of returns (default 2000)")
    sim.add_argument("--start", default="2019-01-01", help="first date (weekdays only)")
    sim.add_argument("--kind", choices=("return", "price"), default="return")

    ts = sub.add_parser("test-series", help="stationarity and diagnostics for one file")
    ts.add_argument("--file", required=True, type=Path)
    ts.add_argument("--date-column", default="date")
    ts.add_argument("--value-column", default="value")
    ts.add_argument("--value-kind", choices=("price", "return"), default="price")
    ts.add_argument("--arch-lags", type=int, default=5)
    ts.add_argument("--json", action="store_true", help="print JSON instead of text")
    return p


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = args.output_dir or cfg.output_dir
    try:
        report = run_pipeline(cfg)
    except AllPairsFailed as exc:
        write_outputs(exc.report, out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED
    write_outputs(report, out)
    print(f"{report.n_success}/{len(report.pairs)} pairs succeeded; outputs in {out}")
    for p in report.pairs:
        if p.error:
            print(f"  {p.asset}/{p.index}: {p.error}", file=sys.stderr)
    return EXIT_OK


def _write_columns(path: Path, dates, columns: dict[str, np.ndarray]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *columns])
        for i, d in enumerate(dates):
            w.writerow([str(d), *(repr(float(c[i])) for c in columns.values())])


def _as_prices(r: np.ndarray) -> np.ndarray:
    # Prepend a base level of 100 so the file yields exactly the simulated returns.
    return 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(r)]) / 100.0)


def _cmd_simulate(args) -> int:
    if args.n < 2:
        raise ConfigError("--n must be at least 2")
    preset = PRESETS[args.preset]
    if args.preset == "garch":
        series = [simulate_garch11(preset["garch"], args.n, args.seed, "value", args.start)]
    else:
        series = list(simulate_dcc(
            preset["garch_a"], preset["garch_b"], preset["dcc"], preset["q_bar"],
            args.n, args.seed, ("asset", "index"), args.start,
        ))
    dates = series[0].dates
    if args.kind == "price":
        before = np.busday_offset(dates[0], -1, roll="backward")
        dates = np.concatenate([[before], dates])
        cols = {s.asset_id: _as_prices(s.values) for s in series}
    else:
        cols = {s.asset_id: s.values for s in series}
    _write_columns(args.out, dates, cols)
    print(f"wrote {len(dates)} rows to {args.out}")
    return EXIT_OK


def _cmd_test_series(args) -> int:
    if not args.file.is_file():
        raise ConfigError(f"data file not found: {args.file}")
    s = load_series(args.file, args.date_column, args.value_column, args.value_kind)
    r = log_returns(s) if isinstance(s, PriceSeries) else s
    stats = describe(r)
    adf, pp = adf_test(r), pp_test(r)
    diag = series_diagnostics(r, args.arch_lags)
    if args.json:
        out = {
            "n_obs": stats.n_obs, "mean": stats.mean, "std_dev": stats.std_dev,
            "adf": {"statistic": adf.statistic, "lags": adf.lags, "reject_at": adf.reject_at},
            "pp": {"statistic": pp.statistic, "bandwidth": pp.lags, "reject_at": pp.reject_at},
            **{k: {"statistic": v.statistic, "df": v.df, "p_value": v.p_value} for k, v in diag.items()},
        }
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"{r.asset_id}: {stats.n_obs} returns, mean {stats.mean:.4f}, std {stats.std_dev:.4f}")
    print(f"  ADF  {adf.statistic:9.3f}{adf.stars:<3}  lags={adf.lags}  reject at {adf.reject_at or '-'}")
    print(f"  PP   {pp.statistic:9.3f}{pp.stars:<3}  bandwidth={pp.lags}  reject at {pp.reject_at or '-'}")
    for name, label in (("arch_lm", "ARCH-LM"), ("breusch_pagan", "BPG")):
        t = diag[name]
        print(f"  {label:<7}{t.statistic:9.3f}{t.stars:<3}  df={t.df}  p={t.p_value:.4f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "simulate": _cmd_simulate, "test-series": _cmd_test_series}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SafeHavenError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
