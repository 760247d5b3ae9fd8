"""Loading price/return files, log returns, calendar alignment and summary stats."""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DuplicateDate,
    InsufficientOverlap,
    MalformedRow,
    NonPositivePrice,
    TooShort,
)

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "DescriptiveStats",
    "AlignedPair",
    "load_series",
    "log_returns",
    "align",
    "describe",
    "static_correlation_matrix",
    "MIN_OVERLAP",
]

MIN_OVERLAP = 30

# Cells treated as missing observations; such rows are dropped, never filled.
_MISSING = {"", "na", "nan", "null", "none", "n/a", "#n/a", "-"}


def _frozen(a: Iterable, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _as_dates(dates: Iterable) -> np.ndarray:
    return _frozen(np.asarray(dates, dtype="datetime64[D]"), "datetime64[D]")


@dataclass(frozen=True)
class _Series:
    asset_id: str
    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", _as_dates(self.dates))
        object.__setattr__(self, "values", _frozen(self.values, float))
        if self.dates.shape != self.values.shape or self.values.ndim != 1:
            raise ValueError("dates and values must be 1-d and of equal length")
        if len(self.dates) > 1 and not np.all(np.diff(self.dates) > np.timedelta64(0, "D")):
            raise ValueError(f"{self.asset_id}: dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def between(self, start=None, end=None):
        """Return a copy restricted to ``start <= date <= end`` (either bound optional)."""
        mask = np.ones(len(self), dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        return type(self)(self.asset_id, self.dates[mask], self.values[mask])

    def at(self, dates: np.ndarray):
        """Restrict to ``dates``, every one of which must be present."""
        dates = _as_dates(dates)
        idx = np.searchsorted(self.dates, dates)
        if np.any(idx >= len(self.dates)) or np.any(self.dates[np.minimum(idx, len(self) - 1)] != dates):
            raise KeyError(f"{self.asset_id}: requested dates not all present")
        return type(self)(self.asset_id, dates, self.values[idx])


@dataclass(frozen=True)
class PriceSeries(_Series):
    """Positive price levels indexed by strictly increasing calendar days."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self) < 2:
            raise TooShort(f"{self.asset_id}: a price series needs at least 2 observations")
        if not np.all(self.values > 0):
            raise NonPositivePrice(f"{self.asset_id}: prices must be strictly positive")


@dataclass(frozen=True)
class ReturnSeries(_Series):
    """Daily log returns in percent."""


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    min: float
    max: float
    std_dev: float
    n_obs: int


@dataclass(frozen=True)
class AlignedPair:
    asset: ReturnSeries
    index: ReturnSeries
    common_dates: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.common_dates)


def _parse_float(text: str, line: int, column: str) -> float | None:
    if text.strip().lower() in _MISSING:
        return None
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(line, f"column {column!r}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise MalformedRow(line, f"column {column!r}: non-finite value {text!r}")
    return value


def load_series(
    path: str | Path,
    date_column: str = "date",
    value_column: str = "value",
    value_kind: Literal["price", "return"] = "price",
    asset_id: str | None = None,
) -> PriceSeries | ReturnSeries:
    """Read one date column and one numeric column from a CSV file.

    Rows whose value cell is empty or a missing-value token (``NA``, ``null``,
    ...) are dropped. Rows are returned sorted by date.

    Raises
    ------
    MalformedRow
        Unparseable date or number; the 1-based file line is attached.
    DuplicateDate
        The same calendar day appears twice.
    NonPositivePrice
        ``value_kind="price"`` and some price is ``<= 0``.
    """
    path = Path(path)
    if value_kind not in ("price", "return"):
        raise ValueError(f"value_kind must be 'price' or 'return', got {value_kind!r}")
    asset_id = asset_id or path.stem

    rows: list[tuple[dt.date, float]] = []
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MalformedRow(1, "empty file, expected a header row")
        for col in (date_column, value_column):
            if col not in reader.fieldnames:
                raise MalformedRow(1, f"header has no column {col!r} (found {reader.fieldnames})")
        for record in reader:
            line = reader.line_num
            raw_date, raw_value = record.get(date_column), record.get(value_column)
            if raw_date is None or raw_value is None:
                raise MalformedRow(line, "too few fields")
            try:
                day = dt.date.fromisoformat(raw_date.strip()[:10])
            except ValueError:
                raise MalformedRow(line, f"cannot parse {raw_date!r} as an ISO-8601 date") from None
            value = _parse_float(raw_value, line, value_column)
            if value is None:
                continue
            if value_kind == "price" and value <= 0:
                raise NonPositivePrice(f"{asset_id}: line {line}: price {value} is not positive")
            rows.append((day, value))

    rows.sort(key=lambda r: r[0])
    for (d0, _), (d1, _) in zip(rows, rows[1:]):
        if d0 == d1:
            raise DuplicateDate(f"{asset_id}: date {d0.isoformat()} appears more than once")

    dates = [r[0] for r in rows]
    values = [r[1] for r in rows]
    if value_kind == "price":
        return PriceSeries(asset_id, dates, values)
    return ReturnSeries(asset_id, dates, values)


def log_returns(p: PriceSeries) -> ReturnSeries:
    """Percent log returns ``100 * ln(p_t / p_{t-1})`` dated at ``t``."""
    if len(p) < 2:
        raise TooShort(f"{p.asset_id}: need at least 2 prices")
    r = 100.0 * np.diff(np.log(p.values))
    return ReturnSeries(p.asset_id, p.dates[1:], r)


def align(a: ReturnSeries, b: ReturnSeries, min_overlap: int = MIN_OVERLAP) -> AlignedPair:
    """Keep only the dates present in both series."""
    if len(a) == 0 or len(b) == 0:
        raise InsufficientOverlap(f"{a.asset_id}/{b.asset_id}: empty series")
    common, ia, ib = np.intersect1d(a.dates, b.dates, assume_unique=True, return_indices=True)
    if len(common) < min_overlap:
        raise InsufficientOverlap(
            f"{a.asset_id}/{b.asset_id}: {len(common)} common dates, need {min_overlap}"
        )
    return AlignedPair(
        ReturnSeries(a.asset_id, common, a.values[ia]),
        ReturnSeries(b.asset_id, common, b.values[ib]),
        _as_dates(common),
    )


def describe(r: ReturnSeries | Sequence[float]) -> DescriptiveStats:
    values = np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)
    if len(values) < 2:
        raise TooShort("descriptive statistics need at least 2 observations")
    mean = float(values.mean())
    lo, hi = float(values.min()), float(values.max())
    # Rounding can push the mean of a constant series a hair outside [min, max].
    mean = min(max(mean, lo), hi)
    return DescriptiveStats(mean, lo, hi, float(values.std(ddof=1)), len(values))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc, yc = x - x.mean(), y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return float("nan")
    return float(np.clip((xc @ yc) / denom, -1.0, 1.0))


def static_correlation_matrix(
    series: Sequence[ReturnSeries], min_overlap: int = MIN_OVERLAP
) -> np.ndarray:
    """Pairwise Pearson correlations, each pair on its own common dates.

    Row/column order follows ``series``. The result is exactly symmetric
    with a unit diagonal.
    """
    if len(series) < 2:
        raise ValueError("need at least 2 series")
    k = len(series)
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            pair = align(series[i], series[j], min_overlap=min_overlap)
            out[i, j] = out[j, i] = _pearson(pair.asset.values, pair.index.values)
    return out
