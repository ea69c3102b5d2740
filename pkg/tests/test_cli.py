"""Command line interface: happy paths and exit codes."""

import json

import pytest
from click.testing import CliRunner

from foreman.cli import main
from foreman.planfile import PlanFile


@pytest.fixture()
def runner():
    return CliRunner()


def plan_to(runner, tmp_path, *args):
    out = tmp_path / "plan.json"
    result = runner.invoke(main, ["plan", *args, "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out, result


class TestPlan:
    def test_plan_prints_utterances_and_cost(self, runner):
        result = runner.invoke(main, ["plan", "--scenario", "bridge", "--strategy", "high-level"])
        assert result.exit_code == 0
        assert "Build a floor from the blue block to the black block." in result.output
        assert "total cost 6" in result.output
        assert result.output.count("ins-railing") == 2

    def test_plan_writes_a_loadable_plan_file(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "mini-bridge", "--strategy", "teaching")
        loaded = PlanFile.from_json(out.read_text())
        assert loaded.strategy_name == "teaching"
        assert loaded.total_cost == 40.0

    def test_plan_accepts_scenario_files(self, runner, tmp_path):
        scenario_path = tmp_path / "scenario.json"
        scenario_path.write_text(json.dumps({"name": "bridge", "length": 4, "width": 3}))
        result = runner.invoke(
            main,
            ["plan", "--scenario-file", str(scenario_path), "--strategy", "high-level"],
        )
        assert result.exit_code == 0
        assert "Build a floor" in result.output

    def test_cost_overrides_change_the_plan_cost(self, runner):
        result = runner.invoke(
            main,
            [
                "plan",
                "--scenario",
                "bridge",
                "--strategy",
                "high-level",
                "--cost-overrides",
                "object=3",
            ],
        )
        assert result.exit_code == 0
        assert "total cost 9" in result.output

    def test_bad_override_is_a_usage_error(self, runner):
        result = runner.invoke(
            main,
            [
                "plan",
                "--scenario",
                "bridge",
                "--strategy",
                "high-level",
                "--cost-overrides",
                "sparkle=3",
            ],
        )
        assert result.exit_code == 2

    def test_scenario_and_file_are_mutually_exclusive(self, runner, tmp_path):
        scenario_path = tmp_path / "scenario.json"
        scenario_path.write_text(json.dumps({"name": "bridge"}))
        result = runner.invoke(
            main,
            [
                "plan",
                "--scenario",
                "bridge",
                "--scenario-file",
                str(scenario_path),
                "--strategy",
                "high-level",
            ],
        )
        assert result.exit_code == 2

    def test_missing_strategy_is_a_usage_error(self, runner):
        result = runner.invoke(main, ["plan", "--scenario", "bridge"])
        assert result.exit_code == 2


class TestValidate:
    def test_valid_plan_passes(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "bridge", "--strategy", "high-level")
        result = runner.invoke(main, ["validate", "--plan", str(out)])
        assert result.exit_code == 0
        assert result.output.startswith("OK:")

    def test_tampered_cost_fails(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "bridge", "--strategy", "high-level")
        document = json.loads(out.read_text())
        document["totalCost"] = 5.0
        out.write_text(json.dumps(document, sort_keys=True, separators=(",", ":")))
        result = runner.invoke(main, ["validate", "--plan", str(out)])
        assert result.exit_code == 1

    def test_malformed_file_fails(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        result = runner.invoke(main, ["validate", "--plan", str(bad)])
        assert result.exit_code == 1

    def test_missing_file_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["validate", "--plan", str(tmp_path / "ghost.json")])
        assert result.exit_code == 1


class TestOracle:
    def test_oracle_reports_optimal_cost(self, runner):
        result = runner.invoke(
            main, ["oracle", "--scenario", "mini-bridge", "--strategy", "high-level"]
        )
        assert result.exit_code == 0
        assert "optimal cost 6" in result.output


class TestSimulate:
    def test_perfect_run_succeeds(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "bridge", "--strategy", "high-level")
        result = runner.invoke(main, ["simulate", "--plan", str(out)])
        assert result.exit_code == 0, result.output
        assert "success=True" in result.output
        assert "mistakes=0" in result.output

    def test_noisy_run_reports_matching_counts(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "bridge", "--strategy", "low-level")
        log = tmp_path / "events.jsonl"
        result = runner.invoke(
            main,
            [
                "simulate",
                "--plan",
                str(out),
                "--follower",
                "noisy:0.3",
                "--seed",
                "11",
                "--log",
                str(log),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "success=True" in result.output
        events = [json.loads(line) for line in log.read_text().splitlines()]
        mistakes = sum(1 for e in events if e["kind"] == "mistake")
        summary = result.output.splitlines()[0]
        assert f"mistakes={mistakes}" in summary
        assert f"injected={mistakes}" in summary

    def test_unknown_follower_is_a_usage_error(self, runner, tmp_path):
        out, _ = plan_to(runner, tmp_path, "--scenario", "mini-bridge", "--strategy", "high-level")
        result = runner.invoke(main, ["simulate", "--plan", str(out), "--follower", "psychic"])
        assert result.exit_code == 2


class TestHelp:
    def test_help_lists_all_commands(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("plan", "validate", "oracle", "simulate", "serve"):
            assert command in result.output
