import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from safehaven.classify import classify_all
from safehaven.dcc import CorrelationPath, DccParams, simulate_dcc
from safehaven.errors import AllPairsFailed, ConfigError, DimensionMismatch
from safehaven.garch import GarchParams, business_days
from safehaven.report import (
    export_correlation_paths,
    load_config,
    parse_config,
    read_correlation_path,
    render_heatmap,
    render_tables,
    run_pipeline,
    write_outputs,
)
from safehaven.report.cli import main
from safehaven.report.config import OUTPUT_DIR_ENV
from safehaven.report.render import heatmap_color

GA = GarchParams(0.05, 0.2, 0.1, 0.8)
GB = GarchParams(0.0, 0.1, 0.08, 0.88)


def write_prices(path, dates, returns):
    prices = 100 * np.exp(np.concatenate([[0.0], np.cumsum(returns)]) / 100)
    day0 = np.busday_offset(dates[0], -1, roll="backward")
    rows = [f"{d},{float(p)!r}" for d, p in zip(np.concatenate([[day0], dates]), prices)]
    path.write_text("date,close\n" + "\n".join(rows) + "\n")


def simulate_inputs(tmp_path):
    """Two assets and two indices on 2019-09..2020-07 weekdays."""
    n = 230
    for k, (asset, index) in enumerate((("gold", "dax"), ("coin", "ftse"))):
        a, b = simulate_dcc(GA, GB, DccParams(0.04, 0.9), 0.3 * (k + 1), n, seed=40 + k, start="2019-09-02")
        write_prices(tmp_path / f"{asset}.csv", a.dates, a.values)
        write_prices(tmp_path / f"{index}.csv", b.dates, b.values)
    return tmp_path


@pytest.fixture
def data_dir(tmp_path):
    return simulate_inputs(tmp_path)


def config_text(assets=("gold", "coin"), indices=("dax", "ftse"), extra=""):
    lines = ["[data]", "value_column = close", "", "[assets]"]
    lines += [f"{a.upper()} = {a}.csv" for a in assets]
    lines += ["", "[indices]"] + [f"{i.upper()} = {i}.csv" for i in indices]
    lines += ["", "[output]", "directory = out", "", extra]
    return "\n".join(lines)


class TestConfig:
    def test_defaults(self, data_dir):
        cfg = parse_config(config_text(), data_dir)
        assert [s.id for s in cfg.assets] == ["GOLD", "COIN"]
        assert cfg.start.isoformat() == "2020-01-02" and cfg.end.isoformat() == "2020-06-30"
        assert cfg.announcement_date.isoformat() == "2020-03-11"
        assert cfg.horizon == 14 and cfg.day_mode == "trading"
        assert cfg.optimizer.restarts >= 3

    def test_missing_file_named(self, data_dir):
        with pytest.raises(ConfigError, match="nothere.csv"):
            parse_config(config_text(assets=("nothere",)), data_dir)

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.ini")

    @pytest.mark.parametrize(
        "extra",
        [
            "[sample]\nstart = 2020-06-30\nend = 2020-01-01",
            "[crisis]\nhorizon = -1",
            "[crisis]\nday_mode = weekly",
            "[optimizer]\nrestarts = 1",
            "[tests]\nadf_lags = many",
        ],
    )
    def test_invalid(self, data_dir, extra):
        with pytest.raises(ConfigError):
            parse_config(config_text(extra=extra), data_dir)

    def test_series_override(self, data_dir):
        cfg = parse_config(config_text(extra="[series:GOLD]\nvalue_kind = return"), data_dir, check_files=False)
        assert cfg.assets[0].value_kind == "return"
        assert cfg.assets[1].value_kind == "price"

    def test_output_env(self, data_dir, monkeypatch, tmp_path):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "elsewhere"))
        assert parse_config(config_text(), data_dir).output_dir == str(tmp_path / "elsewhere")


class TestHeatmap:
    def test_identity(self):
        svg = render_heatmap(np.eye(2), ["a", "b"])
        root = ET.fromstring(svg)
        fills = [r.get("fill") for r in root.iter("{http://www.w3.org/2000/svg}rect")]
        assert fills == ["#053061", "#ffffff", "#ffffff", "#053061"]

    def test_negative(self):
        svg = render_heatmap(np.array([[1, -1], [-1, 1]]), ["a", "b"])
        assert svg.count('fill="#67001f"') == 2
        assert "-1.00" in svg

    def test_escapes_labels(self):
        ET.fromstring(render_heatmap(np.eye(3), ["A&B", "<c>", "d"], title="x < y"))

    @pytest.mark.parametrize("m", [np.eye(3), np.array([[1, 0.2], [0.3, 1]]), np.array([[1, 2], [2, 1]])])
    def test_rejects_bad_matrix(self, m):
        with pytest.raises(DimensionMismatch):
            render_heatmap(m, ["a", "b"])

    def test_color_midpoint(self):
        assert heatmap_color(0.0) == "#ffffff"
        assert heatmap_color(float("nan")) == "#bdbdbd"


class TestCorrelationExport:
    def test_one_file(self, tmp_path):
        path = CorrelationPath(("A", "B"), business_days(5, "2020-03-09"), np.full(5, 0.3))
        (f,) = export_correlation_paths([path], tmp_path, "2020-03-11")
        lines = f.read_text().splitlines()
        assert lines[1] == "# announcement_date=2020-03-11"
        assert lines[2] == "date,rho"
        assert all(line.endswith(",0.3") for line in lines[3:])
        assert len(lines) == 3 + 5

    def test_round_trip(self, tmp_path, rng):
        rho = np.tanh(rng.standard_normal(300))
        path = CorrelationPath(("x y", "z/w"), business_days(300), rho)
        (f,) = export_correlation_paths([path], tmp_path)
        back, meta = read_correlation_path(f)
        assert back.pair == ("x y", "z/w")
        np.testing.assert_allclose(back.rho, rho, rtol=0, atol=1e-9)
        np.testing.assert_array_equal(back.dates, path.dates)


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    data = simulate_inputs(tmp_path_factory.mktemp("data"))
    return run_pipeline(parse_config(config_text(), data))


class TestPipeline:
    def test_every_pair_present(self, report):
        assert [(p.asset, p.index) for p in report.pairs] == [
            ("GOLD", "DAX"), ("GOLD", "FTSE"), ("COIN", "DAX"), ("COIN", "FTSE")
        ]
        assert report.n_success == 4
        for p in report.pairs:
            assert p.regression.n_obs == p.n_obs - 1
            assert p.verdict.crisis_window[0] == "2020-03-11"

    def test_descriptive_and_tests(self, report):
        assert set(report.descriptive) == {"GOLD", "COIN", "DAX", "FTSE"}
        for sid, d in report.descriptive.items():
            assert d.min <= d.mean <= d.max
            assert set(report.unit_root[sid]) == {"adf", "pp"}
            assert set(report.diagnostics[sid]) == {"arch_lm", "breusch_pagan"}
        m = report.correlation_matrix
        assert np.array_equal(m, m.T) and np.all(np.diag(m) == 1)

    def test_minimal_run(self, data_dir):
        rep = run_pipeline(parse_config(config_text(("gold",), ("dax",)), data_dir))
        assert len(rep.pairs) == 1
        tables = render_tables(rep)
        grid = tables["regression.csv"].splitlines()
        assert grid[0] == "term,GOLD"
        assert len(grid) == 4
        reg = rep.pairs[0].regression
        assert grid[1].endswith(f"{reg.coefficients['crisis_index']:.2f}{reg.stars('crisis_index')}")

    def test_failure_isolated(self, data_dir):
        (data_dir / "bad.csv").write_text("date,close\n2020-01-02,1\n2020-01-02,2\n")
        cfg = parse_config(config_text(("gold", "bad"), ("dax",)), data_dir)
        rep = run_pipeline(cfg)
        errs = {p.asset: p.error for p in rep.pairs}
        assert errs["GOLD"] is None
        assert "DuplicateDate" in errs["BAD"]
        assert "BAD" in rep.descriptive and isinstance(rep.descriptive["BAD"], str)
        assert "error" in render_tables(rep)["verdicts.md"]

    def test_all_pairs_failed(self, data_dir):
        text = config_text(("gold",), ("dax",), "[sample]\nstart = 2019-09-03\nend = 2019-12-31")
        with pytest.raises(AllPairsFailed) as info:
            run_pipeline(parse_config(text, data_dir))
        assert info.value.report.pairs[0].error

    def test_outputs(self, report, tmp_path):
        out = tmp_path / "o"
        write_outputs(report, out)
        data = json.loads((out / "report.json").read_text())
        assert len(data["pairs"]) == 4
        assert data["metadata"]["seed"] == report.config.optimizer.seed
        assert data["pairs"][0]["regression"]["cov_type"] == "HC1"
        ET.fromstring((out / "heatmap.svg").read_text())
        assert len(list((out / "correlation_paths").glob("*.csv"))) == 4
        assert "*** significant at 1% level" in (out / "tables" / "regression.md").read_text()

    def test_empty_tables(self, report):
        from dataclasses import replace

        empty = replace(report, pairs=(), summary=classify_all([]))
        tables = render_tables(empty)
        assert "no pairs" in tables["regression.md"]
        assert "no pairs" in tables["verdicts.md"]


class TestCli:
    def test_run_exit_codes(self, data_dir, tmp_path, capsys):
        cfg = data_dir / "run.ini"
        cfg.write_text(config_text(("gold",), ("dax",)))
        assert main(["run", "--config", str(cfg)]) == 0
        assert (data_dir / "out" / "report.json").is_file()
        assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 1
        cfg.write_text(config_text(("gold",), ("dax",), "[sample]\nstart = 2019-09-03\nend = 2019-12-31"))
        assert main(["run", "--config", str(cfg)]) == 2

    def test_simulate_then_test_series(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--preset", "garch", "--seed", "3", "--n", "300", "--out", str(out)]) == 0
        assert main(["test-series", "--file", str(out), "--value-kind", "return", "--json"]) == 0
        result = json.loads(capsys.readouterr().out.split("\n", 1)[1])
        assert result["n_obs"] == 300
        assert result["adf"]["reject_at"] == "1%"

    def test_simulate_prices_round_trip(self, tmp_path):
        out = tmp_path / "pair.csv"
        assert main(["simulate", "--preset", "dcc", "--seed", "1", "--n", "50", "--kind", "price", "--out", str(out)]) == 0
        from safehaven.ingest import load_series, log_returns

        r = log_returns(load_series(out, value_column="asset"))
        a, _ = simulate_dcc(GarchParams(0.0, 0.1, 0.1, 0.85), GarchParams(0.0, 0.05, 0.08, 0.90),
                            DccParams(0.05, 0.90), 0.5, 50, 1, start="2019-01-01")
        np.testing.assert_allclose(r.values, a.values, atol=1e-9)

    def test_test_series_missing_file(self, tmp_path):
        assert main(["test-series", "--file", str(tmp_path / "nope.csv")]) == 1
