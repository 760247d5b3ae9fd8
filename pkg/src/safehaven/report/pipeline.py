"""End-to-end orchestration: ingest -> tests -> GARCH -> DCC -> regression -> labels."""
from __future__ import annotations

import json
import logging
import math
import warnings
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import scipy

from .. import __version__
from ..classify import Verdict, VerdictSummary, classify_all, classify_pair
from ..dcc import DccFit, fit_dcc
from ..diagnostics import LmTestResult, arch_lm_test, breusch_pagan_test
from ..errors import AllPairsFailed, SafeHavenError
from ..garch import GarchFit, GarchOptions, fit_garch11
from ..ingest import (
    DescriptiveStats,
    PriceSeries,
    ReturnSeries,
    align,
    describe,
    load_series,
    log_returns,
    _pearson,
)
from ..regression import RegressionResult, build_covid_dummy, safe_haven_regression
from ..stationarity import UnitRootResult, adf_test, pp_test
from .config import PipelineConfig
from .render import export_correlation_paths, render_heatmap, render_tables

__all__ = ["PairResult", "Report", "run_pipeline", "write_outputs", "series_diagnostics"]

log = logging.getLogger(__name__)

_RECOVERABLE = (SafeHavenError, ValueError, ArithmeticError, KeyError, OSError)


@dataclass(frozen=True)
class PairResult:
    asset: str
    index: str
    n_obs: int = 0
    garch_asset: GarchFit | None = None
    garch_index: GarchFit | None = None
    dcc: DccFit | None = None
    regression: RegressionResult | None = None
    verdict: Verdict | None = None
    error: str | None = None
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class Report:
    config: PipelineConfig
    descriptive: dict[str, DescriptiveStats | str]
    unit_root: dict[str, dict[str, UnitRootResult] | str]
    diagnostics: dict[str, dict[str, LmTestResult] | str]
    correlation_labels: tuple[str, ...]
    correlation_matrix: np.ndarray = field(repr=False)
    pairs: tuple[PairResult, ...] = ()
    summary: VerdictSummary | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def n_success(self) -> int:
        return sum(p.ok for p in self.pairs)

    def to_dict(self) -> dict:
        return _clean(
            {
                "metadata": self.metadata,
                "descriptive": {k: _stats_dict(v) for k, v in self.descriptive.items()},
                "unit_root": {k: _nested(v) for k, v in self.unit_root.items()},
                "diagnostics": {k: _nested(v) for k, v in self.diagnostics.items()},
                "static_correlation": {
                    "labels": list(self.correlation_labels),
                    "matrix": self.correlation_matrix.tolist(),
                },
                "pairs": [_pair_dict(p) for p in self.pairs],
                "verdict_grid": {
                    "assets": list(self.summary.assets) if self.summary else [],
                    "indices": list(self.summary.indices) if self.summary else [],
                    "grid": self.summary.grid() if self.summary else [],
                    "counts": self.summary.counts if self.summary else {},
                },
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- serialisation helpers ------------------------------------------------------

def _clean(obj):
    """Recursively make ``obj`` JSON-safe: nan/inf -> None, numpy scalars -> Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.datetime64):
        return str(obj)
    return obj


def _stats_dict(s):
    if isinstance(s, str):
        return {"error": s}
    return {"mean": s.mean, "min": s.min, "max": s.max, "std_dev": s.std_dev, "n_obs": s.n_obs}


def _result_dict(r):
    if isinstance(r, UnitRootResult):
        return {
            "test": r.test, "statistic": r.statistic, "lags": r.lags, "lag_policy": r.lag_policy,
            "critical_values": r.critical_values, "reject_at": r.reject_at, "spec": r.spec, "nobs": r.nobs,
        }
    return {"test": r.test, "statistic": r.statistic, "df": r.df, "p_value": r.p_value, "nobs": r.nobs}


def _nested(v):
    if isinstance(v, str):
        return {"error": v}
    return {k: _result_dict(r) for k, r in v.items()}


def _garch_dict(g: GarchFit | None):
    if g is None:
        return None
    p = g.params
    return {
        "mu": p.mu, "omega": p.omega, "alpha": p.alpha, "beta": p.beta,
        "loglik": g.loglik, "converged": g.converged, "iterations": g.iterations, "n_obs": len(g),
    }


def _pair_dict(p: PairResult) -> dict:
    out: dict[str, Any] = {"asset": p.asset, "index": p.index, "n_obs": p.n_obs, "error": p.error,
                           "warnings": list(p.warnings)}
    out["garch_asset"] = _garch_dict(p.garch_asset)
    out["garch_index"] = _garch_dict(p.garch_index)
    if p.dcc is not None:
        d = p.dcc
        out["dcc"] = {
            "a": d.params.a, "b": d.params.b, "q_bar_12": d.q_bar[0, 1], "loglik": d.loglik,
            "converged": d.converged, "degenerate": d.degenerate, "clamp_count": d.clamp_count,
            "mean_rho": float(np.mean(d.rho_path)),
        }
    else:
        out["dcc"] = None
    if p.regression is not None:
        r = p.regression
        out["regression"] = {
            "coefficients": r.coefficients, "std_errors": r.std_errors, "t_stats": r.t_stats,
            "p_values": r.p_values, "stars": {k: r.stars(k) for k in r.names},
            "rho_ar1": r.rho_ar1, "n_obs": r.n_obs, "iterations": r.iterations,
            "estimator": "Prais-Winsten (iterated)", "cov_type": r.cov_type,
        }
    else:
        out["regression"] = None
    out["verdict"] = p.verdict.to_dict() if p.verdict is not None else None
    return out


# -- stages -------------------------------------------------------------------

def _fit_seed(base: int, *keys: str) -> int:
    """Stable per-fit seed derived from the run seed and the series ids."""
    words = [zlib.crc32(k.encode("utf-8")) for k in keys]
    return int(np.random.SeedSequence([base, *words]).generate_state(1)[0])


def series_diagnostics(r: ReturnSeries, arch_lags: int = 5) -> dict[str, LmTestResult]:
    """ARCH-LM and Breusch-Pagan-Godfrey on the demeaned return series.

    The Breusch-Pagan auxiliary design is a constant and the lagged return.
    """
    e = r.values - r.values.mean()
    X = np.column_stack([np.ones(len(e) - 1), r.values[:-1]])
    return {
        "arch_lm": arch_lm_test(e, arch_lags),
        "breusch_pagan": breusch_pagan_test(e[1:], X),
    }


def _load(cfg: PipelineConfig) -> tuple[dict[str, ReturnSeries], dict[str, str]]:
    series, errors = {}, {}
    for spec in cfg.series:
        try:
            s = load_series(spec.resolved, spec.date_column, spec.value_column, spec.value_kind, spec.id)
            r = log_returns(s) if isinstance(s, PriceSeries) else s
            series[spec.id] = r.between(cfg.start, cfg.end)
        except _RECOVERABLE as exc:
            errors[spec.id] = f"{type(exc).__name__}: {exc}"
            log.warning("could not load %s: %s", spec.id, exc)
    return series, errors


def _pair(cfg: PipelineConfig, a: ReturnSeries, b: ReturnSeries, cache: dict) -> PairResult:
    pair = align(a, b, cfg.min_overlap)
    fits = []
    for s in (pair.asset, pair.index):
        key = (s.asset_id, s.dates.tobytes())
        if key not in cache:
            opts = replace(cfg.optimizer, seed=_fit_seed(cfg.optimizer.seed, s.asset_id))
            cache[key] = fit_garch11(s, opts)
        fits.append(cache[key])
    opts = replace(cfg.optimizer, seed=_fit_seed(cfg.optimizer.seed, a.asset_id, b.asset_id))
    dcc = fit_dcc(pair, fits[0], fits[1], opts)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dummy = build_covid_dummy(pair.common_dates, cfg.announcement_date.isoformat(), cfg.horizon, cfg.day_mode)
    reg = safe_haven_regression(pair.asset, pair.index, dummy, cfg.prais_max_iter, cfg.prais_rho_tol)
    verdict = classify_pair(dcc.path, reg, dummy.window, cfg.classifier)
    notes = tuple(str(w.message) for w in caught)
    if dcc.degenerate:
        notes += ("standardized residuals are collinear; correlation fixed at +/-1",)
    if not fits[0].converged or not fits[1].converged:
        notes += ("a GARCH fit did not converge",)
    if not dcc.converged and not dcc.degenerate:
        notes += ("DCC fit did not converge",)
    return PairResult(a.asset_id, b.asset_id, len(pair), fits[0], fits[1], dcc, reg, verdict, None, notes)


def run_pipeline(cfg: PipelineConfig) -> Report:
    """Run every stage for every configured (asset, index) pair.

    Failures are recorded per series or per pair and never abort the run,
    except that :class:`AllPairsFailed` (carrying the partial report in its
    ``report`` attribute) is raised when no pair succeeds.
    """
    series, load_errors = _load(cfg)

    descriptive: dict[str, DescriptiveStats | str] = {}
    unit_root: dict[str, Any] = {}
    diagnostics: dict[str, Any] = {}
    lag_policy = ("aic", cfg.adf_max_lags) if cfg.adf_lags == "aic" and cfg.adf_max_lags is not None else cfg.adf_lags
    for spec in cfg.series:
        sid = spec.id
        if sid in load_errors:
            descriptive[sid] = unit_root[sid] = diagnostics[sid] = load_errors[sid]
            continue
        r = series[sid]
        for target, fn in (
            (descriptive, lambda: describe(r)),
            (unit_root, lambda: {"adf": adf_test(r, "constant", lag_policy),
                                 "pp": pp_test(r, "constant", cfg.pp_bandwidth)}),
            (diagnostics, lambda: series_diagnostics(r, cfg.arch_lags)),
        ):
            try:
                target[sid] = fn()
            except _RECOVERABLE as exc:
                target[sid] = f"{type(exc).__name__}: {exc}"

    labels = tuple(s.id for s in cfg.series if s.id in series)
    k = len(labels)
    matrix = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            try:
                p = align(series[labels[i]], series[labels[j]], cfg.min_overlap)
                matrix[i, j] = matrix[j, i] = _pearson(p.asset.values, p.index.values)
            except _RECOVERABLE:
                matrix[i, j] = matrix[j, i] = math.nan

    cache: dict = {}
    pairs = []
    for a in cfg.assets:
        for b in cfg.indices:
            if a.id in load_errors or b.id in load_errors:
                bad = a.id if a.id in load_errors else b.id
                pairs.append(PairResult(a.id, b.id, error=f"series {bad} unavailable: {load_errors[bad]}"))
                continue
            try:
                pairs.append(_pair(cfg, series[a.id], series[b.id], cache))
            except _RECOVERABLE as exc:
                log.warning("pair %s/%s failed: %s", a.id, b.id, exc)
                pairs.append(PairResult(a.id, b.id, error=f"{type(exc).__name__}: {exc}"))

    ok = [p.verdict for p in pairs if p.verdict is not None]
    summary = classify_all(ok, cfg.classifier) if ok else None
    metadata = {
        "package": "safehaven",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "seed": cfg.optimizer.seed,
        "config": cfg.echo(),
        "n_pairs": len(pairs),
        "n_pairs_ok": sum(p.ok for p in pairs),
        "crisis_window_rule": f"{cfg.day_mode} days: announcement + {cfg.horizon}",
        "standard_errors": "HC1 on the Prais-Winsten transformed regression",
    }
    report = Report(cfg, descriptive, unit_root, diagnostics, labels, matrix, tuple(pairs), summary, metadata)
    if pairs and report.n_success == 0:
        err = AllPairsFailed(f"all {len(pairs)} pairs failed")
        err.report = report
        raise err
    return report


def write_outputs(report: Report, out_dir: str | Path | None = None) -> list[Path]:
    """Write the JSON report, tables, heatmap and correlation-path CSVs."""
    cfg = report.config
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    target = out / "report.json"
    target.write_text(report.to_json(), encoding="utf-8")
    written.append(target)
    for name, text in render_tables(report).items():
        target = out / "tables" / name
        target.parent.mkdir(exist_ok=True)
        target.write_text(text, encoding="utf-8")
        written.append(target)
    if len(report.correlation_labels) >= 1:
        target = out / "heatmap.svg"
        target.write_text(
            render_heatmap(report.correlation_matrix, report.correlation_labels, title="Return correlations"),
            encoding="utf-8",
        )
        written.append(target)
    fits = [p.dcc for p in report.pairs if p.dcc is not None]
    written += export_correlation_paths(fits, out / "correlation_paths", cfg.announcement_date.isoformat())
    if cfg.variance_paths:
        vdir = out / "variance_paths"
        vdir.mkdir(exist_ok=True)
        seen = set()
        for p in report.pairs:
            for g in (p.garch_asset, p.garch_index):
                if g is None or (g.asset_id, len(g)) in seen:
                    continue
                seen.add((g.asset_id, len(g)))
                target = vdir / f"{g.asset_id}__n{len(g)}.csv"
                lines = ["date,h,std_residual"] + [
                    f"{d},{h!r},{z!r}" for d, h, z in zip(g.dates, g.h.tolist(), g.std_residuals.tolist())
                ]
                target.write_text("\n".join(lines) + "\n", encoding="utf-8")
                written.append(target)
    return written
