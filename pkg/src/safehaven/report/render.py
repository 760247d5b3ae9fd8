"""Text, CSV and SVG renderings of pipeline results."""
from __future__ import annotations

import csv
import io
import math
import re
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from ..dcc import CorrelationPath, DccFit
from ..errors import DimensionMismatch
from ..regression import significance_stars

if TYPE_CHECKING:
    from .pipeline import Report

__all__ = [
    "render_heatmap",
    "heatmap_color",
    "export_correlation_paths",
    "read_correlation_path",
    "render_tables",
    "STAR_NOTE",
]

STAR_NOTE = "*** significant at 1% level, ** significant at 5% level, * significant at 10% level."

# Diverging scale: -1 dark red, 0 white, +1 dark blue.
_NEG = (103, 0, 31)
_POS = (5, 48, 97)
_MID = (255, 255, 255)


def heatmap_color(value: float) -> str:
    if not math.isfinite(value):
        return "#bdbdbd"
    v = max(-1.0, min(1.0, value))
    end = _NEG if v < 0 else _POS
    w = abs(v)
    rgb = tuple(round(m + (e - m) * w) for m, e in zip(_MID, end))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_heatmap(matrix, labels: Sequence[str], cell: int = 56, title: str = "") -> str:
    """Self-contained SVG of a correlation matrix with printed cell values."""
    m = np.asarray(matrix, dtype=float)
    k = len(labels)
    if m.ndim != 2 or m.shape != (k, k):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match {k} labels")
    finite = np.isfinite(m)
    if np.any(np.abs(m[finite]) > 1.0 + 1e-12):
        raise DimensionMismatch("correlation entries must lie in [-1, 1]")
    if not np.array_equal(finite, finite.T) or not np.allclose(m[finite], m.T[finite], atol=1e-12):
        raise DimensionMismatch("correlation matrix must be symmetric")

    margin = 8 + 7 * max((len(s) for s in labels), default=0)
    top = margin + (24 if title else 0)
    width, height = margin + k * cell + 8, top + k * cell + 8
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>')
    for i, lab in enumerate(labels):
        cy = top + i * cell + cell / 2
        cx = margin + i * cell + cell / 2
        out.append(f'<text x="{margin - 4}" y="{cy:.1f}" text-anchor="end" dominant-baseline="middle">{escape(lab)}</text>')
        out.append(
            f'<text x="{cx:.1f}" y="{top - 4}" text-anchor="start" '
            f'transform="rotate(-60 {cx:.1f} {top - 4})">{escape(lab)}</text>'
        )
    for i in range(k):
        for j in range(k):
            v = m[i, j]
            x, y = margin + j * cell, top + i * cell
            fill = heatmap_color(v)
            ink = "#ffffff" if math.isfinite(v) and abs(v) > 0.6 else "#000000"
            text = f"{v:.2f}" if math.isfinite(v) else "n/a"
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" '
                f'stroke="#ffffff" data-row="{i}" data-col="{j}"/>'
            )
            out.append(
                f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2:.1f}" text-anchor="middle" '
                f'dominant-baseline="middle" fill="{ink}">{text}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "series"


def export_correlation_paths(
    fits: Iterable[DccFit | CorrelationPath],
    out_dir: str | Path,
    announcement_date: str | None = None,
) -> list[Path]:
    """Write one ``date,rho`` CSV per pair.

    A leading ``# announcement_date=YYYY-MM-DD`` line marks the crisis
    announcement. Values are written with full ``repr`` precision.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for f in fits:
        path_data = f.path if isinstance(f, DccFit) else f
        asset, index = path_data.pair
        target = out_dir / f"{_safe_name(asset)}__{_safe_name(index)}.csv"
        with target.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# pair={asset},{index}\n")
            if announcement_date is not None:
                fh.write(f"# announcement_date={announcement_date}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "rho"])
            for d, r in zip(path_data.dates, path_data.rho):
                w.writerow([str(d), repr(float(r))])
        written.append(target)
    return written


def read_correlation_path(path: str | Path) -> tuple[CorrelationPath, dict[str, str]]:
    """Inverse of :func:`export_correlation_paths` for one file."""
    meta: dict[str, str] = {}
    dates, rho = [], []
    with Path(path).open(encoding="utf-8") as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            else:
                body.append(line)
    for row in csv.DictReader(body):
        dates.append(row["date"])
        rho.append(float(row["rho"]))
    pair = tuple(meta.get("pair", ",").split(",", 1))
    return CorrelationPath(pair, np.array(dates, dtype="datetime64[D]"), np.array(rho)), meta


# -- tables -------------------------------------------------------------------

def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _fmt(x, digits: int = 2) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "n/a"
    return f"{x:.{digits}f}"


def _grid_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def render_tables(report: "Report") -> dict[str, str]:
    """Markdown tables laid out like the study's Tables 1-5, plus CSV grids.

    Keys: ``descriptive.md``, ``unit_root.md``, ``diagnostics.md``,
    ``regression.md``, ``regression.csv``, ``verdicts.md``.
    """
    docs: dict[str, str] = {}

    # Descriptive statistics: one column per series.
    ids = list(report.descriptive)
    rows = []
    for label, attr in (("Mean", "mean"), ("Min", "min"), ("Max", "max"), ("Std. Dev.", "std_dev"), ("Obs.", "n_obs")):
        row = [label]
        for sid in ids:
            d = report.descriptive[sid]
            if isinstance(d, str):
                row.append("error")
            else:
                v = getattr(d, attr)
                row.append(str(v) if attr == "n_obs" else _fmt(v))
        rows.append(row)
    docs["descriptive.md"] = "# Descriptive statistics\n\n" + (
        _md_table([""] + ids, rows) if ids else "no series\n"
    )

    # Unit roots.
    rows = []
    for sid, res in report.unit_root.items():
        if isinstance(res, str):
            rows.append([sid, "error", "", "", res])
            continue
        adf, pp = res["adf"], res["pp"]
        verdict = "Stationary" if adf.reject_at == "1%" else "Unit root not rejected at 1%"
        rows.append([sid, f"{adf.statistic:.3f}{adf.stars}", f"{pp.statistic:.3f}{pp.stars}", str(adf.lags), verdict])
    docs["unit_root.md"] = (
        "# Unit-root tests\n\n"
        + (_md_table(["Variable", "ADF t-statistic", "PP Z_t", "ADF lags", "Conclusion"], rows) if rows else "no series\n")
        + "\nNull hypothesis: the series has a unit root. *** rejects at 1%, ** at 5%, * at 10%.\n"
    )

    # Diagnostics.
    rows = []
    for sid, res in report.diagnostics.items():
        if isinstance(res, str):
            rows.append([sid, "error", "error"])
            continue
        a, b = res["arch_lm"], res["breusch_pagan"]
        rows.append([sid, f"{a.statistic:.3f}{a.stars}", f"{b.statistic:.3f}{b.stars}"])
    docs["diagnostics.md"] = (
        "# ARCH-LM and heteroskedasticity tests\n\n"
        + (_md_table(["Variable", "ARCH-LM", "Breusch-Pagan-Godfrey"], rows) if rows else "no series\n")
        + "\n" + STAR_NOTE + "\n"
    )

    # Regression grid: crisis rows, then contemporaneous, then lagged index rows.
    assets = [s.id for s in report.config.assets]
    indices = [s.id for s in report.config.indices]
    results = {(p.asset, p.index): p for p in report.pairs}
    grid_rows = []
    for term, fmt_name in (("crisis_index", "COVID*{}"), ("index", "{}"), ("index_lag", "{} (-1)")):
        for idx in indices:
            row = [fmt_name.format(idx)]
            for a in assets:
                p = results.get((a, idx))
                if p is None or p.regression is None:
                    row.append("error")
                else:
                    reg = p.regression
                    row.append(f"{reg.coefficients[term]:.2f}{significance_stars(reg.p_values[term])}")
            grid_rows.append(row)
    if report.pairs:
        docs["regression.md"] = (
            "# Crisis regressions (Prais-Winsten, HC1 standard errors)\n\n"
            + _md_table([""] + assets, grid_rows)
            + "\n" + STAR_NOTE + "\n"
        )
        docs["regression.csv"] = _grid_csv(["term"] + assets, grid_rows)
    else:
        docs["regression.md"] = "# Crisis regressions (Prais-Winsten, HC1 standard errors)\n\nno pairs\n"
        docs["regression.csv"] = "term\n"

    # Verdicts.
    if report.pairs:
        vrows = []
        for idx in indices:
            row = [idx]
            for a in assets:
                p = results.get((a, idx))
                row.append(p.verdict.label.value if p is not None and p.verdict is not None else "error")
            vrows.append(row)
        counts = report.summary.counts if report.summary else {}
        crow = [
            [a] + [str(counts.get(a, {}).get(lbl, 0)) for lbl in ("SafeHaven", "Hedge", "Diversifier", "None")]
            for a in assets
        ]
        docs["verdicts.md"] = (
            "# Classification\n\n" + _md_table([""] + assets, vrows)
            + "\n## Counts per asset\n\n" + _md_table(["Asset", "SafeHaven", "Hedge", "Diversifier", "None"], crow)
        )
    else:
        docs["verdicts.md"] = "# Classification\n\nno pairs\n"
    return docs
