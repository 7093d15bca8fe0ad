"""Command-line interface: exit codes, output schemas, config handling."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from plate_fsi.cli import ConfigError, load_config, main

# Reduced resolution so every invocation stays fast; the acceptance suite
# exercises the default configuration.
REDUCED = [
    "--set", "N=16", "--set", "M=32", "--set", "T=0.25", "--set", "dt=0.03125",
]


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


class TestConfig:
    def test_defaults(self) -> None:
        cfg = load_config(None, ())
        assert cfg["alpha"] == 1.0
        assert cfg["n"] == 2
        assert cfg["N"] == 32
        assert cfg["dt"] == pytest.approx(0.5 / 64.0)

    def test_file_with_comments_and_overrides(self, tmp_path: Path) -> None:
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# sample configuration\n"
            "alpha = 2.5   # stiffer plate\n"
            "\n"
            "N = 16\n"
        )
        cfg = load_config(str(cfg_file), ("alpha=3.0",))
        assert cfg["alpha"] == 3.0  # --set wins over the file
        assert cfg["N"] == 16
        assert cfg["gamma"] == 1.0  # untouched default

    def test_unknown_key_names_the_key(self, tmp_path: Path) -> None:
        cfg_file = tmp_path / "bad.cfg"
        cfg_file.write_text("viscosity = 2\n")
        with pytest.raises(ConfigError, match="viscosity"):
            load_config(str(cfg_file), ())

    def test_unparsable_value(self) -> None:
        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(None, ("N=sixteen",))

    def test_set_requires_key_value(self) -> None:
        with pytest.raises(ConfigError, match="key=value"):
            load_config(None, ("alpha",))

    def test_missing_file(self) -> None:
        with pytest.raises(ConfigError, match="cannot read"):
            load_config("/nonexistent/path.cfg", ())


class TestAnalyzeSymbol:
    def test_default_run(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["analyze-symbol", "--json"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert payload["vertices"] == [[6.0, 0.0], [2.0, 2.0], [0.0, 2.5]]
        assert payload["pass"] is True
        assert not payload["sector_too_wide"]
        assert payload["theta"] == pytest.approx(
            (payload["phi"] - payload["phi0"]) / 8.0
        )

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["analyze-symbol", "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout

    def test_sector_beyond_half_pi_exits_2(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["analyze-symbol", "--set", "phi=1.6"])
        assert res.exit_code == 2

    def test_invalid_parameter_exits_1(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["analyze-symbol", "--set", "alpha=-1"])
        assert res.exit_code == 1
        assert "alpha" in res.output


class TestPolygon:
    def test_exact_report(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["polygon", "--json"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert payload["vertices"] == [["6", "0"], ["2", "2"], ["0", "5/2"]]
        assert payload["relevant_weights"] == ["1", "2", "3", "4", "8"]

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["polygon", "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout


class TestSolveLinear:
    def test_default_sweep_csv(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear"])
        assert res.exit_code == 0
        lines = res.stdout.splitlines()
        assert lines[0] == "# schema=1"
        assert lines[1] == "re_lambda,im_lambda,z,eta_abs,p0_abs,residual_max,pass"
        data = lines[2:]
        assert len(data) == 64
        assert all(line.endswith(",1") for line in data)

    def test_json_sweep(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear", "--json", "--grid", "3x2"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert len(payload["rows"]) == 6
        assert payload["pass"] is True

    def test_degenerate_single_point(self, runner: CliRunner) -> None:
        from plate_fsi.frequency import DegenerateTangentialFrequency

        with pytest.warns(DegenerateTangentialFrequency):
            res = runner.invoke(
                main, ["solve-linear", "--lambda", "1+0i", "--z", "0", "--json"]
            )
        assert res.exit_code == 0
        row = json.loads(res.stdout)["rows"][0]
        assert row["eta_abs"] == 0.0
        assert row["p0_abs"] == pytest.approx(1.0)

    def test_lambda_requires_z(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear", "--lambda", "1+0i"])
        assert res.exit_code == 1

    def test_bad_grid_spec(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear", "--grid", "8"])
        assert res.exit_code == 1
        assert "grid" in res.output

    def test_corrupted_pressure_trace_exits_3(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear", "--corrupt-p0", "--grid", "2x2"])
        assert res.exit_code == 3

    def test_out_file(self, runner: CliRunner, tmp_path: Path) -> None:
        target = tmp_path / "sweep.csv"
        res = runner.invoke(
            main, ["solve-linear", "--grid", "2x2", "--out", str(target)]
        )
        assert res.exit_code == 0
        lines = target.read_text().splitlines()
        assert lines[0] == "# schema=1"
        assert len(lines) == 2 + 4

    def test_threaded_sweep_matches_serial(self, runner: CliRunner) -> None:
        serial = runner.invoke(main, ["solve-linear", "--grid", "3x3"])
        threaded = runner.invoke(
            main, ["solve-linear", "--grid", "3x3"],
            env={"PLATE_FSI_THREADS": "4"},
        )
        assert threaded.exit_code == 0
        assert threaded.stdout == serial.stdout

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["solve-linear", "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout


class TestSimulate:
    def test_zero_forcing_is_immediate_fixed_point(
        self, runner: CliRunner, tmp_path: Path
    ) -> None:
        res = runner.invoke(
            main,
            ["simulate", *REDUCED, "--set", "amplitude=0",
             "--json", "--out", str(tmp_path / "out")],
        )
        assert res.exit_code == 0
        summary = json.loads(res.stdout)
        assert summary["converged"] is True
        assert summary["iterations"] == 1

    def test_small_amplitude_writes_artifacts(
        self, runner: CliRunner, tmp_path: Path
    ) -> None:
        out = tmp_path / "run"
        res = runner.invoke(
            main, ["simulate", *REDUCED, "--json", "--out", str(out)]
        )
        assert res.exit_code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["converged"] is True
        steps = (out / "steps.csv").read_text().splitlines()
        assert steps[0] == "# schema=1"
        assert steps[1] == "t,v_sup,eta_sup,residual"
        assert len(steps) == 2 + 8 + 1  # header rows + steps + initial state
        fields = (out / "fields.csv").read_text().splitlines()
        assert fields[0] == "# schema=1"
        assert len(fields) == 2 + 16 * 33

    def test_runs_are_deterministic(self, runner: CliRunner, tmp_path: Path) -> None:
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            res = runner.invoke(
                main, ["simulate", *REDUCED, "--json", "--out", str(out)]
            )
            assert res.exit_code == 0
            outputs.append(
                (out / "steps.csv").read_bytes()
                + (out / "summary.json").read_bytes()
            )
        assert outputs[0] == outputs[1]

    def test_large_amplitude_exits_4(self, runner: CliRunner, tmp_path: Path) -> None:
        res = runner.invoke(
            main,
            ["simulate", *REDUCED, "--set", "amplitude=40",
             "--json", "--out", str(tmp_path / "out")],
        )
        assert res.exit_code == 4
        payload = json.loads(res.stdout)
        assert payload["no_contraction"] is True
        assert payload["contraction_ratios"]

    def test_subcritical_exponent_exits_1(
        self, runner: CliRunner, tmp_path: Path
    ) -> None:
        res = runner.invoke(
            main,
            ["simulate", *REDUCED, "--set", "p=1.2", "--out", str(tmp_path / "out")],
        )
        assert res.exit_code == 1
        assert "config error" in res.output

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["simulate", *REDUCED, "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout


class TestCheckCompat:
    def test_compatible_family_passes(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["check-compat", *REDUCED, "--json"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert payload["passed"] is True
        assert [item["name"] for item in payload["items"]] == [
            "divergence-data",
            "duality-pairing",
            "no-slip-trace",
            "kinematic-trace",
        ]

    def test_small_exponent_skips_traces(self, runner: CliRunner) -> None:
        res = runner.invoke(
            main, ["check-compat", *REDUCED, "--set", "p=1.4", "--json"]
        )
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        statuses = {item["name"]: item["status"] for item in payload["items"]}
        assert statuses["no-slip-trace"] == "NOT_REQUIRED"
        assert statuses["kinematic-trace"] == "NOT_REQUIRED"

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["check-compat", *REDUCED, "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout


class TestIndex:
    def test_default_report(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["index", "--json"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert payload["thresholds"] == {
            "n": 2, "quadratic": "4/3", "multiplier": "1", "triple": "7/6"
        }
        assert len(payload["catalog"]) == 9
        assert payload["all_hold"] is True

    def test_subcritical_exponent_reports_failures(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["index", "--set", "p=1.2", "--json"])
        assert res.exit_code == 0
        payload = json.loads(res.stdout)
        assert payload["all_hold"] is False

    def test_invalid_dimension_exits_1(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["index", "--set", "n=1"])
        assert res.exit_code == 1

    def test_check_mode(self, runner: CliRunner) -> None:
        res = runner.invoke(main, ["index", "--check"])
        assert res.exit_code == 0
        assert "check: ok" in res.stdout
