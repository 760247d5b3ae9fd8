import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _published
from safehaven.classify import (
    ClassifierConfig,
    Evidence,
    Label,
    classify_all,
    classify_pair,
    evidence_from_stars,
    label_from_evidence,
)
from safehaven.dcc import CorrelationPath
from safehaven.errors import WindowOutOfRange
from safehaven.garch import business_days
from safehaven.regression import RegressionResult

DATES = business_days(120, "2020-01-02")
WINDOW = ("2020-03-11", "2020-03-31")


def _reg(beta, p):
    names = ("const", "own_lag", "index", "crisis_index", "index_lag")
    zero = {k: 0.0 for k in names}
    return RegressionResult(names, {**zero, "crisis_index": beta}, dict(zero), dict(zero),
                            {**{k: 1.0 for k in names}, "crisis_index": p}, 0.0, 119, 1, "HC1", np.zeros(119))


def _path(rho):
    return CorrelationPath(("a", "i"), DATES, np.broadcast_to(np.asarray(rho, dtype=float), (len(DATES),)).copy())


class TestRule:
    def test_significant_negative_is_safe_haven(self):
        crisis = np.where((DATES >= np.datetime64(WINDOW[0])) & (DATES <= np.datetime64(WINDOW[1])), -0.2, 0.1)
        v = classify_pair(_path(crisis), _reg(-0.16, 0.005), WINDOW)
        assert v.label is Label.SAFE_HAVEN
        assert v.beta_significant_negative
        assert v.evidence.crisis_mean_rho == pytest.approx(-0.2)

    def test_significant_positive_falls_through(self):
        v = classify_pair(_path(0.3), _reg(0.28, 0.001), WINDOW)
        assert v.label is Label.DIVERSIFIER
        v = classify_pair(_path(-0.1), _reg(0.28, 0.001), WINDOW)
        assert v.label is Label.HEDGE

    def test_zero_everything_is_hedge(self):
        assert classify_pair(_path(0.0), _reg(0.0, 0.9), WINDOW).label is Label.HEDGE

    def test_insignificant_negative_with_negative_crisis_rho(self):
        assert classify_pair(_path(-0.05), _reg(-0.1, 0.5), WINDOW).label is Label.SAFE_HAVEN

    def test_high_correlation_is_none(self):
        assert classify_pair(_path(0.8), _reg(0.1, 0.5), WINDOW).label is Label.NONE

    def test_window_not_covered(self):
        with pytest.raises(WindowOutOfRange):
            classify_pair(_path(0.1), _reg(0.0, 1.0), ("2021-01-01", "2021-01-10"))

    def test_missing_evidence_is_none(self):
        assert label_from_evidence(Evidence()) is Label.NONE

    def test_thresholds_configurable(self):
        ev = Evidence(0.1, 0.5, 0.3, 0.3)
        assert label_from_evidence(ev, ClassifierConfig(diversifier_cap=0.2)) is Label.NONE
        assert label_from_evidence(ev, ClassifierConfig(hedge_cap=0.35)) is Label.HEDGE

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-2, 2), st.floats(0, 1), st.floats(-1, 1), st.floats(-1, 1),
        st.floats(0, 1), st.floats(0, 1),
    )
    def test_monotone_towards_safe_haven(self, beta, p, crisis_rho, full_rho, d_beta, d_rho):
        before = label_from_evidence(Evidence(beta, p, crisis_rho, full_rho))
        after = label_from_evidence(Evidence(beta - d_beta, p, crisis_rho - d_rho, full_rho))
        if before is Label.SAFE_HAVEN:
            assert after is Label.SAFE_HAVEN


class TestSummary:
    def test_grid_and_counts(self):
        ev = {("T", i): Evidence(-0.1, 0.01, -0.1, -0.1) for i in "ABCDEFGHI"}
        ev[("T", "J")] = Evidence(0.1, 0.5, 0.1, 0.1)
        s = classify_all(ev)
        assert s.count("T", "SafeHaven") == 9
        assert s.count("T", Label.DIVERSIFIER) == 1
        assert len(s.grid()) == 10 and len(s.grid()[0]) == 1

    def test_empty_evidence_is_none(self):
        s = classify_all({("a", i): Evidence() for i in ("x", "y")})
        assert s.count("a", Label.NONE) == 2

    def test_permutation(self):
        rng = np.random.default_rng(0)
        ev = {(a, i): Evidence(*rng.uniform(-1, 1, 2), *rng.uniform(-1, 1, 2)) for a in "abc" for i in "xyz"}
        keys = list(ev)
        shuffled = {k: ev[k] for k in reversed(keys)}
        a, b = classify_all(ev), classify_all(shuffled)
        assert a.labels == b.labels


class TestStars:
    @pytest.mark.parametrize("stars, p", [("***", 0.005), ("**", 0.03), ("*", 0.07), ("", 0.5)])
    def test_mapping(self, stars, p):
        assert evidence_from_stars(-1.0, stars).crisis_p_value == p
        assert math.isnan(evidence_from_stars(-1.0, stars).full_mean_rho)

    def test_table_fixture_shape(self):
        cells = list(_published.cells())
        assert len(cells) == 80
        assert ("DOGECOIN", "OMXS30", -0.16, "***") in cells
        assert ("GOLD", "FTSE-100", -0.004, "") in cells

    def test_published_coefficients_never_label_major_coins(self):
        labels = classify_all({(a, i): evidence_from_stars(b, s) for a, i, b, s in _published.cells()})
        for coin in ("BITCOIN", "ETHEREUM", "LITECOIN", "RIPPLE"):
            assert labels.count(coin, Label.SAFE_HAVEN) == 0
