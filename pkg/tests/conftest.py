import time
import numpy as np
import pytest

from safehaven.ingest import ReturnSeries
from safehaven.garch import business_days

_CRITERIA: dict[str, list] = {}
_START: list[float] = []
SUITE_BUDGET_SECONDS = 120.0


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion checked by this test")


def pytest_sessionstart(session):
    _START.append(time.perf_counter())


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    name = props.get("criterion")
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        detail = props.get("detail", "")
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2].removeprefix("Skipped: ")
        _CRITERIA.setdefault(name, []).append((outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _CRITERIA.items():
        outcomes = {o for o, _ in results}
        overall = "FAIL" if "FAIL" in outcomes else "SKIP" if outcomes == {"SKIP"} else "PASS"
        details = "; ".join(dict.fromkeys(d for _, d in results if d))
        terminalreporter.write_line(f"{overall}  {name}" + (f"  ({details})" if details else ""))
    elapsed = time.perf_counter() - _START[0]
    verdict = "PASS" if elapsed < SUITE_BUDGET_SECONDS else "FAIL"
    terminalreporter.write_line(f"{verdict}  Suite runtime  ({elapsed:.0f} s, budget {SUITE_BUDGET_SECONDS:.0f} s)")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def returns(values, asset_id="x", start="2020-01-02"):
    values = np.asarray(values, dtype=float)
    return ReturnSeries(asset_id, business_days(len(values), start), values)


@pytest.fixture
def make_returns():
    return returns

