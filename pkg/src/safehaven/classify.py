"""Safe-haven / hedge / diversifier labels for (asset, index) pairs.

Decision rule, applied in order:

1. ``SafeHaven`` if the crisis-interaction coefficient is negative and
   either significant at ``significance`` or accompanied by a negative
   mean DCC correlation inside the crisis window.
2. ``Hedge`` if the full-sample mean correlation is ``<= hedge_cap``.
3. ``Diversifier`` if it lies in ``(hedge_cap, diversifier_cap]``.
4. ``None`` otherwise, including when the needed evidence is missing.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .dcc import CorrelationPath
from .errors import WindowOutOfRange
from .regression import RegressionResult

__all__ = [
    "Label",
    "Evidence",
    "Verdict",
    "ClassifierConfig",
    "label_from_evidence",
    "evidence_from_stars",
    "classify_pair",
    "classify_all",
    "VerdictSummary",
    "CRISIS_TERM",
]

CRISIS_TERM = "crisis_index"


class Label(str, Enum):
    SAFE_HAVEN = "SafeHaven"
    HEDGE = "Hedge"
    DIVERSIFIER = "Diversifier"
    NONE = "None"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ClassifierConfig:
    significance: float = 0.10
    hedge_cap: float = 0.0
    diversifier_cap: float = 0.5


@dataclass(frozen=True)
class Evidence:
    """Inputs to the decision rule; ``nan`` marks a missing quantity."""

    crisis_beta: float = math.nan
    crisis_p_value: float = math.nan
    crisis_mean_rho: float = math.nan
    full_mean_rho: float = math.nan

    def beta_significant(self, level: float) -> bool:
        return math.isfinite(self.crisis_p_value) and self.crisis_p_value <= level

    def significant_negative(self, level: float) -> bool:
        return self.crisis_beta < 0 and self.beta_significant(level)

    def significant_positive(self, level: float) -> bool:
        return self.crisis_beta > 0 and self.beta_significant(level)


def label_from_evidence(ev: Evidence, cfg: ClassifierConfig = ClassifierConfig()) -> Label:
    # Comparisons with nan are False, so missing evidence never satisfies a branch.
    if ev.crisis_beta < 0 and (ev.beta_significant(cfg.significance) or ev.crisis_mean_rho < 0):
        return Label.SAFE_HAVEN
    if ev.full_mean_rho <= cfg.hedge_cap:
        return Label.HEDGE
    if cfg.hedge_cap < ev.full_mean_rho <= cfg.diversifier_cap:
        return Label.DIVERSIFIER
    return Label.NONE


@dataclass(frozen=True)
class Verdict:
    pair: tuple[str, str]
    label: Label
    evidence: Evidence
    crisis_window: tuple[str, str] | None
    config: ClassifierConfig = field(default_factory=ClassifierConfig)

    @property
    def beta_significant_negative(self) -> bool:
        return self.evidence.significant_negative(self.config.significance)

    def to_dict(self) -> dict:
        ev = self.evidence
        return {
            "asset": self.pair[0],
            "index": self.pair[1],
            "label": self.label.value,
            "crisis_window": list(self.crisis_window) if self.crisis_window else None,
            "evidence": {
                "crisis_beta": ev.crisis_beta,
                "crisis_p_value": ev.crisis_p_value,
                "crisis_beta_significant_negative": self.beta_significant_negative,
                "crisis_mean_rho": ev.crisis_mean_rho,
                "full_mean_rho": ev.full_mean_rho,
            },
            "thresholds": {
                "significance": self.config.significance,
                "hedge_cap": self.config.hedge_cap,
                "diversifier_cap": self.config.diversifier_cap,
            },
        }


def classify_pair(
    rho: CorrelationPath,
    reg: RegressionResult,
    window: tuple,
    cfg: ClassifierConfig = ClassifierConfig(),
) -> Verdict:
    """Label one pair from its DCC correlation path and crisis regression.

    ``window`` is the inclusive ``(start, end)`` date range of the crisis.
    """
    start, end = (np.datetime64(d, "D") for d in window)
    if start > end:
        raise ValueError("window start is after its end")
    if len(rho.dates) == 0 or start < rho.dates[0] or end > rho.dates[-1]:
        raise WindowOutOfRange(f"correlation path does not cover {start}..{end}")
    if CRISIS_TERM not in reg.coefficients:
        raise KeyError(f"regression has no {CRISIS_TERM!r} coefficient")
    ev = Evidence(
        crisis_beta=reg.coefficients[CRISIS_TERM],
        crisis_p_value=reg.p_values[CRISIS_TERM],
        crisis_mean_rho=rho.mean(start, end),
        full_mean_rho=rho.mean(),
    )
    return Verdict(rho.pair, label_from_evidence(ev, cfg), ev, (str(start), str(end)), cfg)


@dataclass(frozen=True)
class VerdictSummary:
    assets: tuple[str, ...]
    indices: tuple[str, ...]
    labels: Mapping[tuple[str, str], Label]
    counts: Mapping[str, Mapping[str, int]]

    def count(self, asset: str, label: Label | str) -> int:
        return self.counts[asset].get(Label(label).value, 0)

    def grid(self) -> list[list[str]]:
        """Rows are indices, columns are assets; missing pairs are blank."""
        return [
            [self.labels[(a, i)].value if (a, i) in self.labels else "" for a in self.assets]
            for i in self.indices
        ]


def classify_all(
    verdicts: Iterable[Verdict] | Mapping[tuple[str, str], Evidence],
    cfg: ClassifierConfig = ClassifierConfig(),
) -> VerdictSummary:
    """Collect verdicts into an index-by-asset grid with per-asset label counts.

    Accepts either finished :class:`Verdict` objects or a mapping from
    ``(asset, index)`` to :class:`Evidence`, which is labelled with ``cfg``.
    """
    if isinstance(verdicts, Mapping):
        labels = {pair: label_from_evidence(ev, cfg) for pair, ev in verdicts.items()}
    else:
        labels = {v.pair: v.label for v in verdicts}
    assets = tuple(dict.fromkeys(a for a, _ in labels))
    indices = tuple(dict.fromkeys(i for _, i in labels))
    counts: dict[str, dict[str, int]] = {}
    for a in assets:
        c = Counter(labels[(a, i)].value for i in indices if (a, i) in labels)
        counts[a] = {lbl.value: c.get(lbl.value, 0) for lbl in Label}
    return VerdictSummary(assets, indices, labels, counts)


def evidence_from_stars(beta: float, stars: str) -> Evidence:
    """Evidence from a published coefficient and its star annotation.

    Stars only bound the p-value, so each is mapped to a value strictly
    inside its band: ``***`` 0.005, ``**`` 0.03, ``*`` 0.07, none 0.5.
    """
    p = {"***": 0.005, "**": 0.03, "*": 0.07, "": 0.5}[stars.strip()]
    return Evidence(crisis_beta=beta, crisis_p_value=p)

