import numpy as np
import pytest
from click.testing import CliRunner

from eulertube.cli import main
from eulertube.errors import ConfigError
from eulertube.reports import parse
from eulertube.scenarios import BUILTIN_SCENARIOS, scenario_from_config


@pytest.fixture
def runner():
    return CliRunner()


class TestConfigValidation:
    def test_missing_scenario_field(self):
        with pytest.raises(ConfigError, match="scenario"):
            scenario_from_config({})

    def test_unknown_scenario_name(self):
        with pytest.raises(ConfigError, match="scenario"):
            scenario_from_config({"scenario": "torus"})

    def test_unknown_submanifold_name(self):
        with pytest.raises(ConfigError, match="submanifold"):
            scenario_from_config({"scenario": "circle", "submanifold": "lemniscate"})

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="color"):
            scenario_from_config({"scenario": "circle", "color": "red"})

    def test_unknown_tolerance_key(self):
        with pytest.raises(ConfigError, match="wobble"):
            scenario_from_config({"scenario": "circle", "tolerances": {"wobble": 0.1}})

    def test_nonpositive_values_rejected(self):
        with pytest.raises(ConfigError, match="delta0"):
            scenario_from_config({"scenario": "circle", "delta0": -1.0})
        with pytest.raises(ConfigError, match="diagram"):
            scenario_from_config({"scenario": "circle", "tolerances": {"diagram": 0.0}})

    def test_overrides_applied(self):
        scn = scenario_from_config(
            {"scenario": "circle", "delta0": 1.0, "samples": {"grid": 5}}
        )
        assert scn.delta0 == 1.0
        assert scn.sample("grid") == 5
        # untouched values fall through to the builtin
        assert scn.background == BUILTIN_SCENARIOS["circle"].background


class TestCliCommands:
    def test_list(self, runner):
        result = runner.invoke(main, ["list"])
        assert result.exit_code == 0
        assert "flat-slice" in result.output
        assert "point-2d" in result.output

    def test_run_point_scenario(self, runner):
        result = runner.invoke(main, ["run", "point-2d", "--format", "records"])
        assert result.exit_code == 0
        reports = parse(result.output)
        assert len(reports) == 1
        assert reports[0].passed

    def test_run_writes_report_file(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("EULERTUBE_OUT", str(tmp_path))
        result = runner.invoke(main, ["run", "appendix", "--out", "report.tsv"])
        assert result.exit_code == 0
        on_disk = (tmp_path / "report.tsv").read_text()
        assert on_disk == result.output

    def test_run_unknown_target(self, runner):
        result = runner.invoke(main, ["run", "moebius"])
        assert result.exit_code != 0
        assert "moebius" in result.output

    def test_check_valid_config(self, runner, tmp_path):
        cfg = tmp_path / "scn.yaml"
        cfg.write_text("scenario: circle\ndelta0: 1.5\n")
        result = runner.invoke(main, ["check", str(cfg)])
        assert result.exit_code == 0
        assert "ok: circle" in result.output

    def test_check_unknown_field(self, runner, tmp_path):
        cfg = tmp_path / "scn.yaml"
        cfg.write_text("scenario: circle\nsubmanifold: lemniscate\n")
        result = runner.invoke(main, ["check", str(cfg)])
        assert result.exit_code != 0
        assert "submanifold" in result.output

    def test_failing_stage_sets_exit_code(self, runner, tmp_path):
        # impossible tolerance: the point-case residual cannot reach 1e-300
        result = runner.invoke(main, ["run", "point-2d", "--tol", "1e-300"])
        assert result.exit_code == 1

    def test_repeat_run_is_bitwise_identical(self, runner):
        a = runner.invoke(main, ["run", "appendix"])
        b = runner.invoke(main, ["run", "appendix"])
        assert a.output == b.output
