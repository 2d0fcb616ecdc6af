"""Tests for the batch driver and its result files."""

import json
from unittest.mock import patch

import pytest

from micdam.errors import StepFailure
from micdam.sim import read_history, run, summarize_history
from micdam.sim import runner as runner_module
from micdam.types import HistoryRecord, LoadingProgram, MeshSpec, OutputSettings, RunConfig
from tests.test_solver import uniaxial_plane_strain_force


def strip_config(directory, steps=2, target=4.0e-3, field_every=1):
    return RunConfig(
        mesh=MeshSpec(geometry="strip", width=2.0, height=4.0, thickness=1.5),
        loading=LoadingProgram(target=target, steps=steps, control="top:y",
                               fixed=("bottom:y", "left:x")),
        output=OutputSettings(directory=directory, field_every=field_every),
    )


def records(forces, displacements=None):
    displacements = displacements or range(1, len(forces) + 1)
    return [
        HistoryRecord(step=k + 1, u=float(u), F=float(f), iters=2, cutbacks=0, dissipation=0.0, maxD=0.0)
        for k, (u, f) in enumerate(zip(displacements, forces))
    ]


class TestSummarizeHistory:
    """Tests for peak and softening measures."""

    def test_peak_and_half_peak(self):
        """The half-peak displacement is interpolated on the descending branch."""
        summary = summarize_history(records([1.0, 3.0, 2.0, 1.0]))
        assert summary["peak_force"] == 3.0
        assert summary["u_at_peak"] == 2.0
        assert summary["peak_step"] == 2
        assert summary["u_at_half_peak"] == pytest.approx(3.5)

    def test_no_softening(self):
        """A monotonic history has no half-peak point."""
        summary = summarize_history(records([1.0, 2.0, 3.0]))
        assert summary["peak_force"] == 3.0
        assert summary["u_at_half_peak"] is None

    def test_compressive_ramp(self):
        """A negative ramp reports its most negative force as the peak."""
        summary = summarize_history(records([-1.0, -4.0, -1.0], [-1.0, -2.0, -3.0]), direction=-1.0)
        assert summary["peak_force"] == -4.0
        assert summary["u_at_half_peak"] == pytest.approx(-2.0 - 2.0 / 3.0)

    def test_empty(self):
        """No committed steps give a zero peak."""
        assert summarize_history([])["peak_force"] == 0.0


class TestRun:
    """Tests for a complete elastic run."""

    def test_elastic_strip(self, tmp_path):
        """History, fields, eigen files and the report are written and match the closed form."""
        config = strip_config(tmp_path)
        result = run(config)
        assert result.completed
        assert [r.step for r in result.records] == [1, 2]
        p = config.material
        for record in result.records:
            expected = uniaxial_plane_strain_force(p, 1.0 + record.u / 4.0, 2.0, 1.5)
            assert record.F == pytest.approx(expected, rel=1e-6)

        assert read_history(tmp_path / "history.csv") == result.records
        for step in (1, 2):
            assert (tmp_path / f"fields_{step:04d}.vtk").is_file()
            assert (tmp_path / f"eigen_{step:04d}.csv").is_file()
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["status"] == "complete"
        assert report["steps_committed"] == 2
        assert report["peak_force"] == pytest.approx(result.records[-1].F)
        assert report["max_damage"] == 0.0
        assert report["mesh"]["elements"] == 1
        assert report["variant"] == "B"
        assert "failure" not in report

    def test_final_fields_always_written(self, tmp_path):
        """The last committed step is written even off the field interval."""
        run(strip_config(tmp_path, steps=3, target=3.0e-3, field_every=2))
        assert sorted(p.name for p in tmp_path.glob("fields_*.vtk")) == [
            "fields_0002.vtk", "fields_0003.vtk",
        ]

    def test_without_files(self, tmp_path):
        """write_files=False leaves the output directory untouched."""
        result = run(strip_config(tmp_path / "out"), write_files=False)
        assert result.completed
        assert not (tmp_path / "out").exists()

    def test_step_failure_keeps_partial_results(self, tmp_path):
        """A failed step ends the ramp, records the failure and keeps the history."""
        real = runner_module.solve_load_step
        calls = []

        def failing(system, target, dt):
            calls.append(target)
            if len(calls) == 2:
                raise StepFailure("forced", source="solver",
                                  details={"committed_u": system.control_value, "target": target})
            return real(system, target, dt)

        with patch("micdam.sim.runner.solve_load_step", side_effect=failing):
            result = run(strip_config(tmp_path, steps=3, target=3.0e-3))
        assert not result.completed
        assert len(result.records) == 1
        assert len(read_history(tmp_path / "history.csv")) == 1
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["status"] == "failed"
        assert report["failure"]["code"] == "step_failure"
        assert report["failure"]["target"] == pytest.approx(2.0e-3)
        assert (tmp_path / "fields_0001.vtk").is_file()


@pytest.mark.slow
class TestPlateBenchmark:
    """The quarter plate with hole loaded into the damaging range."""

    def test_damage_localizes_at_the_hole(self, tmp_path):
        """Damage appears, dissipation accumulates and the report is complete."""
        config = RunConfig(
            loading=LoadingProgram(target=0.4, steps=8),
            output=OutputSettings(directory=tmp_path, field_every=4),
        )
        result = run(config)
        assert result.completed
        assert result.report["max_damage"] > 0.0
        assert result.report["dissipation"] > 0.0
        assert result.report["mesh"]["elements"] == 128
