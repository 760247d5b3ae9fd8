import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safehaven.errors import TooShort
from safehaven.stationarity import (
    adf_test,
    critical_values,
    newey_west_bandwidth,
    pp_test,
    schwert_max_lag,
)


def df_tstat_oracle(y):
    """Dickey-Fuller t-ratio with a constant and no lags, from scalar sums."""
    y = np.asarray(y, dtype=float)
    dy, x = np.diff(y), y[:-1]
    m = len(dy)
    xbar, dbar = sum(x) / m, sum(dy) / m
    sxx = sum((xi - xbar) ** 2 for xi in x)
    sxy = sum((xi - xbar) * (di - dbar) for xi, di in zip(x, dy))
    gamma = sxy / sxx
    const = dbar - gamma * xbar
    ssr = sum((di - const - gamma * xi) ** 2 for xi, di in zip(x, dy))
    return gamma / math.sqrt(ssr / (m - 2) / sxx)


class TestCriticalValues:
    def test_asymptotic_constant(self):
        cv = critical_values("constant", 10**12)
        assert cv["1%"] == pytest.approx(-3.43035, abs=1e-5)
        assert cv["5%"] == pytest.approx(-2.86154, abs=1e-5)
        assert cv["10%"] == pytest.approx(-2.56677, abs=1e-5)

    @pytest.mark.parametrize("spec", ["none", "constant", "constant+trend"])
    @pytest.mark.parametrize("n", [25, 100, 500])
    def test_ordered(self, spec, n):
        cv = critical_values(spec, n)
        assert cv["1%"] < cv["5%"] < cv["10%"]

    def test_finite_sample_more_negative(self):
        assert critical_values("constant", 50)["5%"] < critical_values("constant", 5000)["5%"]


class TestAdf:
    def test_fixed_zero_matches_closed_form(self, rng):
        for _ in range(5):
            y = np.cumsum(rng.standard_normal(200))
            res = adf_test(y, "constant", 0)
            assert res.statistic == pytest.approx(df_tstat_oracle(y), abs=1e-8)
            assert res.lags == 0

    def test_scale_invariant(self, rng):
        y = rng.standard_normal(300)
        a, b = adf_test(y), adf_test(37.5 * y)
        assert a.lags == b.lags
        assert a.statistic == pytest.approx(b.statistic, rel=1e-10)

    def test_too_short(self):
        with pytest.raises(TooShort):
            adf_test(np.arange(20.0), "constant", 0)

    def test_aic_lag_bounded_by_schwert(self, rng):
        y = rng.standard_normal(400)
        res = adf_test(y)
        assert 0 <= res.lags <= schwert_max_lag(400)
        assert res.lag_policy.startswith("aic")

    def test_aic_with_cap(self, rng):
        res = adf_test(rng.standard_normal(300), "c", ("aic", 3))
        assert res.lags <= 3
        assert res.spec == "constant"

    def test_ar_process_picks_lags(self, rng):
        e = rng.standard_normal(1000)
        dy = np.empty_like(e)
        dy[:2] = e[:2]
        for t in range(2, len(e)):
            dy[t] = 0.5 * dy[t - 1] - 0.3 * dy[t - 2] + e[t]
        assert adf_test(np.cumsum(dy)).lags >= 2

    @pytest.mark.slow
    def test_white_noise_rejects_at_one_percent(self):
        rng = np.random.default_rng(7)
        hits = sum(adf_test(rng.standard_normal(500)).reject_at == "1%" for _ in range(1000))
        assert hits / 1000 >= 0.99

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_reject_level_consistent(self, seed):
        y = np.cumsum(np.random.default_rng(seed).standard_normal(120)) * 0.3
        res = adf_test(y, "constant", 1)
        cv = res.critical_values
        expected = next((lvl for lvl in ("1%", "5%", "10%") if res.statistic < cv[lvl]), None)
        assert res.reject_at == expected


class TestPp:
    def test_bandwidth_rule(self):
        assert newey_west_bandwidth(100) == 4
        assert newey_west_bandwidth(500) == 5

    def test_zero_bandwidth_equals_df(self, rng):
        # Without autocorrelation correction Z_t reduces to the Dickey-Fuller t-ratio.
        y = np.cumsum(rng.standard_normal(150))
        assert pp_test(y, "constant", 0).statistic == pytest.approx(df_tstat_oracle(y), abs=1e-8)

    def test_scale_invariant(self, rng):
        y = rng.standard_normal(250)
        assert pp_test(y).statistic == pytest.approx(pp_test(0.01 * y).statistic, rel=1e-10)

    def test_white_noise_rejects_at_one_percent(self):
        rng = np.random.default_rng(8)
        hits = sum(pp_test(rng.standard_normal(500)).reject_at == "1%" for _ in range(1000))
        assert hits / 1000 >= 0.99

    def test_agrees_with_adf_on_stationary_returns(self, rng):
        r = rng.standard_t(4, size=180)
        assert (adf_test(r).reject_at == "1%") == (pp_test(r).reject_at == "1%")

    def test_bad_policy(self, rng):
        with pytest.raises(ValueError):
            pp_test(rng.standard_normal(100), "constant", "andrews")
