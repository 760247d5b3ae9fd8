"""Safe-haven analysis of assets against equity indices.

Two-stage DCC-GARCH correlations, Prais-Winsten crisis regressions,
unit-root and heteroskedasticity tests, and a rule-based
safe-haven / hedge / diversifier classifier.
"""
__version__ = "0.1.0"

from .classify import (
    ClassifierConfig,
    Evidence,
    Label,
    Verdict,
    classify_all,
    classify_pair,
    evidence_from_stars,
    label_from_evidence,
)
from .dcc import CorrelationPath, DccFit, DccParams, dcc_loglik, dcc_recursion, estimate_q_bar, fit_dcc, simulate_dcc
from .diagnostics import LmTestResult, arch_lm_test, breusch_pagan_test
from .errors import *  # noqa: F401,F403
from .garch import GarchFit, GarchOptions, GarchParams, fit_garch11, garch_loglik, garch_variance, simulate_garch11
from .ingest import (
    AlignedPair,
    DescriptiveStats,
    PriceSeries,
    ReturnSeries,
    align,
    describe,
    load_series,
    log_returns,
    static_correlation_matrix,
)
from .regression import (
    CovidDummy,
    RegressionResult,
    build_covid_dummy,
    ols_fit,
    prais_winsten_fit,
    safe_haven_regression,
)
from .stationarity import UnitRootResult, adf_test, pp_test
