"""Exit-code and output contract tests for the command-line front end."""

import dataclasses
from pathlib import Path

import pytest

from qflows import cli
from qflows.cli import main
from qflows.dynamics import IntegrationError, TimeGrid
from qflows.scenario import RunResult, preset, serialize_config


@pytest.fixture
def light_config_file(tmp_path) -> Path:
    config = dataclasses.replace(
        preset("fig3_left"), grid=TimeGrid(t_start=0.0, t_end=1.0, n_steps=21)
    )
    path = tmp_path / "light.toml"
    path.write_text(serialize_config(config), encoding="utf-8")
    return path


class TestListPresets:
    def test_prints_all_presets(self, capsys):
        assert main(["list-presets"]) == 0
        out = capsys.readouterr().out
        lines = [line for line in out.splitlines() if line]
        assert len(lines) == 8
        assert any(line.startswith("fig5_measured:") for line in lines)


class TestValidate:
    def test_good_config(self, capsys, light_config_file):
        assert main(["validate", str(light_config_file)]) == 0
        assert capsys.readouterr().out.startswith("ok: fig3_left")

    def test_bad_config(self, capsys, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text(
            serialize_config(preset("fig3_left")).replace(
                'engine = "von_neumann"', 'engine = "lindblad"'
            ),
            encoding="utf-8",
        )
        assert main(["validate", str(bad)]) == 1
        assert "incompatible" in capsys.readouterr().err

    def test_missing_file(self, capsys, tmp_path):
        assert main(["validate", str(tmp_path / "absent.toml")]) == 1
        assert "cannot read config file" in capsys.readouterr().err


class TestRun:
    def test_run_writes_artifacts(self, capsys, tmp_path, light_config_file):
        out_dir = tmp_path / "out"
        assert main(["run", str(light_config_file), "--out", str(out_dir)]) == 0
        message = capsys.readouterr().out
        assert "wrote" in message
        assert (out_dir / "fig3_left.csv").exists()
        assert (out_dir / "fig3_left.json").exists()

    def test_config_and_preset_are_exclusive(self, capsys, light_config_file):
        assert main(["run", str(light_config_file), "--preset", "fig3_left"]) == 1
        assert "exactly one" in capsys.readouterr().err

    def test_requires_config_or_preset(self, capsys):
        assert main(["run"]) == 1
        assert "exactly one" in capsys.readouterr().err

    def test_unknown_preset(self, capsys, tmp_path):
        assert main(["run", "--preset", "fig99", "--out", str(tmp_path)]) == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_integration_error_maps_to_exit_two(self, capsys, monkeypatch, tmp_path):
        def blow_up(config, out_dir=None):
            raise IntegrationError("solver stalled")

        monkeypatch.setattr(cli, "run_scenario", blow_up)
        assert main(["run", "--preset", "fig3_left", "--out", str(tmp_path)]) == 2
        assert "integration error" in capsys.readouterr().err

    def test_violations_map_to_exit_three(self, capsys, monkeypatch, tmp_path):
        result = RunResult(
            exit_code=3,
            violations=5,
            csv_path=tmp_path / "x.csv",
            json_path=tmp_path / "x.json",
        )
        monkeypatch.setattr(cli, "run_scenario", lambda config, out_dir=None: result)
        assert main(["run", "--preset", "fig3_left", "--out", str(tmp_path)]) == 3
        captured = capsys.readouterr()
        assert "wrote" in captured.out
        assert "invariant violations: 5" in captured.err
