"""Tests for the CLI interface."""

import json
from unittest.mock import Mock, patch

import pytest

from micdam.__main__ import build_parser, main
from micdam.errors import CalibrationError, StepFailure
from micdam.logging import configure
from micdam.sim.calibration import CalibrationResult, Trial

REPORT = {
    "status": "complete",
    "steps_committed": 50,
    "steps_requested": 50,
    "peak_force": 1234.5,
    "u_at_peak": 0.42,
    "u_at_half_peak": 0.61,
    "dissipation": 7.5,
    "cutbacks": 2,
}


@pytest.fixture(autouse=True)
def quiet_logging():
    yield
    configure(False)


def run_result(failure=None, report=REPORT):
    return Mock(report=dict(report), failure=failure, peak_force=report["peak_force"])


class TestParser:
    """Tests for argument parser."""

    def test_parser_has_run_command(self):
        """Parser includes run subcommand with common options."""
        args = build_parser().parse_args(["run", "-c", "cfg.toml", "--override", "material.eta_v=2",
                                          "--override", "mesh.level=1", "--threads", "4"])
        assert args.command == "run"
        assert str(args.config) == "cfg.toml"
        assert args.override == ["material.eta_v=2", "mesh.level=1"]
        assert args.threads == 4

    def test_calibrate_requires_bracket(self):
        """Calibrate needs --bracket LOW HIGH."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["calibrate"])

    def test_calibrate_reference_options_exclusive(self):
        """A reference variant and a reference peak cannot both be given."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["calibrate", "--bracket", "1", "2",
                                       "--reference-variant", "A", "--reference-peak", "3"])

    def test_sweep_defaults(self):
        """Sweeps have sensible defaults."""
        parser = build_parser()
        assert parser.parse_args(["sweep-viscosity"]).values == [1.0, 2.0, 4.0, 10.0]
        assert parser.parse_args(["sweep-refinement"]).levels == [0, 1, 2]
        assert parser.parse_args(["sweep-anisotropy"]).variants == ["A", "B", "C"]

    def test_no_command_returns_none(self):
        """No command sets command to None."""
        assert build_parser().parse_args([]).command is None


class TestMain:
    """Tests for main function."""

    def test_no_command_shows_help(self, capsys):
        """No command shows help and returns 0."""
        assert main([]) == 0
        assert "usage:" in capsys.readouterr().out.lower()

    def test_variants_command(self, capsys):
        """Variants command lists all variants."""
        assert main(["variants"]) == 0
        out = capsys.readouterr().out
        assert "Available variants" in out
        for tag in ("A", "B", "C", "local"):
            assert f"  {tag} " in out

    @patch("micdam.__main__.run")
    def test_run_success(self, mock_run, capsys, tmp_path):
        """Run prints a summary and applies --out and --threads."""
        mock_run.return_value = run_result()
        assert main(["run", "--out", str(tmp_path), "--threads", "3"]) == 0
        config = mock_run.call_args.args[0]
        assert config.output.directory == tmp_path
        assert config.solver.threads == 3
        out = capsys.readouterr().out
        assert "1234.5" in out
        assert "u at 0.5 Fmax" in out

    @patch("micdam.__main__.run")
    def test_run_step_failure(self, mock_run, capsys):
        """A failed load step returns 2 after printing the partial summary."""
        report = {**REPORT, "status": "failed", "steps_committed": 10}
        failure = StepFailure("load step failed", source="solver")
        mock_run.return_value = run_result(failure, report)
        assert main(["run"]) == 2
        captured = capsys.readouterr()
        assert "10/50" in captured.out
        assert "Error:" in captured.err

    @patch("micdam.__main__.run")
    def test_config_error(self, mock_run, capsys):
        """An invalid override returns 1 without running."""
        assert main(["run", "--override", "material.theta=5"]) == 1
        mock_run.assert_not_called()
        assert "Error:" in capsys.readouterr().err

    def test_missing_config_file(self, capsys, tmp_path):
        """A missing config file returns 1."""
        assert main(["run", "-c", str(tmp_path / "absent.toml")]) == 1
        assert "cannot read config file" in capsys.readouterr().err

    def test_mesh_command(self, capsys, tmp_path):
        """Mesh writes the generated mesh file."""
        path = tmp_path / "strip.mesh"
        assert main(["mesh", "--override", "mesh.geometry=strip", "--override", "mesh.level=1",
                     str(path)]) == 0
        assert path.read_text(encoding="utf-8").startswith("MICDAM-MESH 1")
        assert "4 Q4 elements" in capsys.readouterr().out

    @patch("micdam.__main__.calibrate_length_scale")
    def test_calibrate_with_reference_peak(self, mock_calibrate, capsys, tmp_path):
        """Calibrate writes its summary next to the runs."""
        mock_calibrate.return_value = CalibrationResult(
            length_scale=1300.0, peak_force=2001.0, reference_peak=2000.0,
            trials=[Trial(1300.0, 2001.0, 0.0005)],
        )
        assert main(["calibrate", "--variant", "C", "--bracket", "100", "5000",
                     "--reference-peak", "2000", "--out", str(tmp_path)]) == 0
        config, reference, bracket = mock_calibrate.call_args.args
        assert config.material.variant.tag == "C"
        assert reference == 2000.0
        assert bracket == (100.0, 5000.0)
        summary = json.loads((tmp_path / "calibration.json").read_text(encoding="utf-8"))
        assert summary["variant"] == "C"
        assert summary["length_scale"] == 1300.0
        assert "1300" in capsys.readouterr().out

    @patch("micdam.__main__.calibrate_length_scale")
    @patch("micdam.__main__.run")
    def test_calibrate_against_reference_variant(self, mock_run, mock_calibrate, tmp_path):
        """Without --reference-peak the reference variant is run first."""
        mock_run.return_value = run_result()
        mock_calibrate.return_value = CalibrationResult(1.0, 1234.5, 1234.5)
        assert main(["calibrate", "--variant", "A", "--bracket", "1", "2", "--out", str(tmp_path)]) == 0
        reference_config = mock_run.call_args.args[0]
        assert reference_config.material.variant.tag == "B"
        assert reference_config.output.directory == tmp_path / "reference"
        assert mock_calibrate.call_args.args[1] == 1234.5

    @patch("micdam.__main__.calibrate_length_scale")
    def test_calibration_error(self, mock_calibrate, capsys):
        """A failed calibration returns 3."""
        mock_calibrate.side_effect = CalibrationError("no sign change", source="calibration")
        assert main(["calibrate", "--bracket", "1", "2", "--reference-peak", "5"]) == 3
        assert "Error:" in capsys.readouterr().err

    @patch("micdam.__main__.viscosity_sweep")
    def test_sweep_writes_summary(self, mock_sweep, capsys, tmp_path):
        """Sweeps write <command>.json into the output directory."""
        mock_sweep.return_value = {"study": "viscosity", "runs": [], "peak_spread": 0.012}
        assert main(["sweep-viscosity", "--values", "1", "3", "--out", str(tmp_path)]) == 0
        assert mock_sweep.call_args.args[1] == [1.0, 3.0]
        assert json.loads((tmp_path / "sweep-viscosity.json").read_text())["peak_spread"] == 0.012
        assert "1.200%" in capsys.readouterr().out

    @patch("micdam.__main__.anisotropy_sweep")
    def test_anisotropy_sweep(self, mock_sweep, capsys, tmp_path):
        """The anisotropy sweep reports the isotropic excess per variant."""
        mock_sweep.return_value = {"study": "anisotropy", "pairs": [
            {"variant": "B", "peak_anisotropic": 100.0, "peak_isotropic": 110.0, "excess": 0.1},
        ]}
        assert main(["sweep-anisotropy", "--variants", "B", "--out", str(tmp_path)]) == 0
        assert "variant B: isotropic excess 10.000%" in capsys.readouterr().out

    @patch("micdam.__main__.run")
    def test_verbose_writes_json_lines(self, mock_run, capsys):
        """--verbose emits JSON audit events on stderr."""
        mock_run.return_value = run_result()
        assert main(["run", "--verbose"]) == 0
        lines = [json.loads(line) for line in capsys.readouterr().err.splitlines() if line]
        assert lines[0]["event"] == "config_loaded"
        assert lines[0]["payload"]["variant"] == "B"
