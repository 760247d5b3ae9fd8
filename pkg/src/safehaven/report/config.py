"""INI-style pipeline configuration.

Example::

    [data]
    date_column = Date
    value_column = Close
    value_kind = price

    [assets]
    BITCOIN = data/btc.csv
    GOLD = data/gold.csv

    [indices]
    DAX-30 = data/dax.csv

    [series:GOLD]            ; optional per-file overrides
    value_column = Price

Every other section is optional and defaults to the 2020 COVID study
(sample 2020-01-02..2020-06-30, announcement 2020-03-11, 14-observation
window). Relative paths resolve against the config file's directory. The
``SAFEHAVEN_OUTPUT_DIR`` environment variable overrides ``[output] directory``.
"""
from __future__ import annotations

import configparser
import datetime as dt
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..classify import ClassifierConfig
from ..errors import ConfigError
from ..garch import GarchOptions
from ..regression import ANNOUNCEMENT_DATE, CRISIS_HORIZON

__all__ = ["SeriesSpec", "PipelineConfig", "load_config", "parse_config", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "SAFEHAVEN_OUTPUT_DIR"


@dataclass(frozen=True)
class SeriesSpec:
    id: str
    path: str
    date_column: str = "date"
    value_column: str = "value"
    value_kind: str = "price"
    base_dir: str = field(default=".", repr=False, compare=False)

    @property
    def resolved(self) -> Path:
        p = Path(self.path)
        return p if p.is_absolute() else Path(self.base_dir) / p


@dataclass(frozen=True)
class PipelineConfig:
    assets: tuple[SeriesSpec, ...]
    indices: tuple[SeriesSpec, ...]
    start: dt.date | None = dt.date(2020, 1, 2)
    end: dt.date | None = dt.date(2020, 6, 30)
    announcement_date: dt.date = dt.date.fromisoformat(ANNOUNCEMENT_DATE)
    horizon: int = CRISIS_HORIZON
    day_mode: str = "trading"
    adf_lags: int | str = "aic"
    adf_max_lags: int | None = None
    pp_bandwidth: int | str = "newey_west_auto"
    arch_lags: int = 5
    optimizer: GarchOptions = GarchOptions(seed=20200311)
    classifier: ClassifierConfig = ClassifierConfig()
    min_overlap: int = 30
    prais_max_iter: int = 1000
    prais_rho_tol: float = 1e-8
    output_dir: str = "safehaven-output"
    variance_paths: bool = False

    def __post_init__(self) -> None:
        if not self.assets or not self.indices:
            raise ConfigError("at least one asset and one index are required")
        ids = [s.id for s in self.assets + self.indices]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ConfigError(f"series ids must be unique, repeated: {dupes}")
        if self.start and self.end and not self.start < self.end:
            raise ConfigError(f"sample start {self.start} is not before end {self.end}")
        if self.horizon < 0:
            raise ConfigError("crisis horizon must be >= 0")
        if self.day_mode not in ("trading", "calendar"):
            raise ConfigError(f"day_mode must be 'trading' or 'calendar', got {self.day_mode!r}")
        for s in self.assets + self.indices:
            if s.value_kind not in ("price", "return"):
                raise ConfigError(f"{s.id}: value_kind must be 'price' or 'return'")

    @property
    def series(self) -> tuple[SeriesSpec, ...]:
        return self.assets + self.indices

    def check_files(self) -> None:
        for s in self.series:
            if not s.resolved.is_file():
                raise ConfigError(f"{s.id}: data file not found: {s.resolved}")

    def echo(self) -> dict:
        """Plain-data copy of the configuration for the report metadata."""
        out = asdict(self)
        for group in ("assets", "indices"):
            for s in out[group]:
                s.pop("base_dir")
        for k in ("start", "end", "announcement_date"):
            out[k] = out[k].isoformat() if out[k] else None
        return out


def _get(cp: configparser.ConfigParser, section: str, key: str, default=None):
    if cp.has_section(section) and cp.has_option(section, key):
        return cp.get(section, key).strip()
    return default


def _int_or(text, fallback_words: tuple[str, ...], what: str):
    if text is None:
        return None
    if text in fallback_words:
        return text
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{what}: expected an integer or one of {fallback_words}, got {text!r}") from None


def _typed(cp, section, key, conv, default):
    raw = _get(cp, section, key)
    if raw is None:
        return default
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _date(text: str) -> dt.date | None:
    return None if text.lower() in ("", "none") else dt.date.fromisoformat(text)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, base_dir: str | Path = ".", check_files: bool = True) -> PipelineConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keep series ids case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None

    defaults = {
        "date_column": _get(cp, "data", "date_column", "date"),
        "value_column": _get(cp, "data", "value_column", "value"),
        "value_kind": _get(cp, "data", "value_kind", "price"),
    }

    def specs(section: str) -> tuple[SeriesSpec, ...]:
        if not cp.has_section(section):
            return ()
        out = []
        for sid, path in cp.items(section):
            over = dict(cp.items(f"series:{sid}")) if cp.has_section(f"series:{sid}") else {}
            kw = {k: over.get(k, v) for k, v in defaults.items()}
            out.append(SeriesSpec(sid, over.get("path", path), base_dir=str(base_dir), **kw))
        return tuple(out)

    opt = GarchOptions(
        tolerance=_typed(cp, "optimizer", "tolerance", float, 1e-8),
        max_iter=_typed(cp, "optimizer", "max_iter", int, 4000),
        restarts=_typed(cp, "optimizer", "restarts", int, 3),
        seed=_typed(cp, "optimizer", "seed", int, 20200311),
    )
    if opt.restarts < 3:
        raise ConfigError("[optimizer] restarts must be at least 3")
    cls = ClassifierConfig(
        significance=_typed(cp, "classify", "significance", float, 0.10),
        hedge_cap=_typed(cp, "classify", "hedge_cap", float, 0.0),
        diversifier_cap=_typed(cp, "classify", "diversifier_cap", float, 0.5),
    )
    output_dir = os.environ.get(OUTPUT_DIR_ENV) or _get(cp, "output", "directory", "safehaven-output")
    if not Path(output_dir).is_absolute() and OUTPUT_DIR_ENV not in os.environ:
        output_dir = str(Path(base_dir) / output_dir)

    cfg = PipelineConfig(
        assets=specs("assets"),
        indices=specs("indices"),
        start=_typed(cp, "sample", "start", _date, dt.date(2020, 1, 2)),
        end=_typed(cp, "sample", "end", _date, dt.date(2020, 6, 30)),
        announcement_date=_typed(cp, "crisis", "announcement_date", dt.date.fromisoformat,
                                 dt.date.fromisoformat(ANNOUNCEMENT_DATE)),
        horizon=_typed(cp, "crisis", "horizon", int, CRISIS_HORIZON),
        day_mode=_get(cp, "crisis", "day_mode", "trading"),
        adf_lags=_int_or(_get(cp, "tests", "adf_lags", "aic"), ("aic",), "[tests] adf_lags"),
        adf_max_lags=_typed(cp, "tests", "adf_max_lags", int, None),
        pp_bandwidth=_int_or(_get(cp, "tests", "pp_bandwidth", "newey_west_auto"),
                             ("newey_west_auto",), "[tests] pp_bandwidth"),
        arch_lags=_typed(cp, "tests", "arch_lags", int, 5),
        optimizer=opt,
        classifier=cls,
        min_overlap=_typed(cp, "sample", "min_overlap", int, 30),
        prais_max_iter=_typed(cp, "regression", "max_iter", int, 1000),
        prais_rho_tol=_typed(cp, "regression", "rho_tol", float, 1e-8),
        output_dir=output_dir,
        variance_paths=_typed(cp, "output", "variance_paths", _bool, False),
    )
    if check_files:
        cfg.check_files()
    return cfg


def load_config(path: str | Path, check_files: bool = True) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), path.parent, check_files)
