"""Batch driver: one displacement-controlled simulation from a RunConfig."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from micdam.errors import StepFailure
from micdam.fem.boundary import build_boundary_conditions
from micdam.fem.mesh import DofMap, Mesh
from micdam.fem.solver import CoupledSystem, solve_load_step
from micdam.geometry import DEFAULT_CONSTRAINTS, generate
from micdam.logging import get_logger, log_event
from micdam.sim.output import HistoryWriter, write_eigen_csv, write_fields, write_json
from micdam.sim.postprocess import eigen_postprocess
from micdam.types import HistoryRecord, RunConfig

logger = get_logger("runner")


@dataclass
class RunResult:
    """Outcome of one simulation; ``failure`` is set when a step could not be completed."""

    config: RunConfig
    system: CoupledSystem
    records: list[HistoryRecord] = field(default_factory=list)
    penalty_history: list[float] = field(default_factory=list)
    failure: StepFailure | None = None
    report: dict[str, Any] = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.failure is None

    @property
    def peak_force(self) -> float:
        return float(self.report["peak_force"])


def build_system(config: RunConfig, mesh: Mesh | None = None) -> CoupledSystem:
    """Mesh, boundary conditions and the coupled system of a configuration."""
    mesh = mesh if mesh is not None else generate(config.mesh)
    log_event(
        logger, "mesh_ready", geometry=config.mesh.geometry, mesh_level=config.mesh.level,
        nodes=mesh.n_nodes, elements=mesh.n_elements, grading=mesh.grading,
    )
    control, fixed = config.loading.control, config.loading.fixed
    if control is None or fixed is None:
        default_control, default_fixed = DEFAULT_CONSTRAINTS[config.mesh.geometry]
        control = control or default_control
        fixed = fixed if fixed is not None else default_fixed
    dofmap = DofMap(mesh.n_nodes, mesh.dim, config.material.n_dbar)
    bcs = build_boundary_conditions(mesh, dofmap, control, fixed)
    return CoupledSystem(mesh, config.material, bcs, config.solver)


def summarize_history(records: Sequence[HistoryRecord], direction: float = 1.0) -> dict[str, Any]:
    """Peak force, displacement at peak and at half the peak on the descending branch.

    ``direction`` is the sign of the load ramp, so compressive runs report
    their extreme (negative) force as the peak.
    """
    if not records:
        return {"peak_force": 0.0, "u_at_peak": 0.0, "u_at_half_peak": None, "peak_step": None}
    sign = 1.0 if direction >= 0 else -1.0
    forces = np.array([r.F for r in records]) * sign
    disp = np.array([r.u for r in records])
    k = int(np.argmax(forces))
    half = 0.5 * forces[k]
    u_half = None
    previous_u, previous_f = disp[k], forces[k]
    for u, f in zip(disp[k + 1 :], forces[k + 1 :]):
        if f <= half:
            t = (previous_f - half) / (previous_f - f) if previous_f != f else 1.0
            u_half = float(previous_u + t * (u - previous_u))
            break
        previous_u, previous_f = u, f
    return {
        "peak_force": float(records[k].F),
        "u_at_peak": float(records[k].u),
        "u_at_half_peak": u_half,
        "peak_step": records[k].step,
    }


def _field_paths(directory: Path, step: int) -> tuple[Path, Path]:
    return directory / f"fields_{step:04d}.vtk", directory / f"eigen_{step:04d}.csv"


def _write_step_fields(system: CoupledSystem, directory: Path, step: int) -> None:
    vtk_path, eigen_path = _field_paths(directory, step)
    write_fields(system, vtk_path, step)
    write_eigen_csv(eigen_postprocess(system), eigen_path)


def build_report(result: RunResult) -> dict[str, Any]:
    config, system = result.config, result.system
    records = result.records
    summary = summarize_history(records, config.loading.target)
    peak_step = summary["peak_step"]
    penalty_at_peak = result.penalty_history[peak_step - 1] if peak_step else None
    report: dict[str, Any] = {
        "status": "complete" if result.completed else "failed",
        **summary,
        "steps_committed": len(records),
        "steps_requested": config.loading.steps,
        "cutbacks": sum(r.cutbacks for r in records),
        "newton_iterations": sum(r.iters for r in records),
        "dissipation": float(sum(r.dissipation for r in records)),
        "max_damage": max((r.maxD for r in records), default=0.0),
        "penalty_rms_at_peak": penalty_at_peak,
        "penalty_rms": list(result.penalty_history),
        "mesh": {
            "nodes": system.mesh.n_nodes,
            "elements": system.mesh.n_elements,
            "dofs": system.n_dofs,
            "grading": system.mesh.grading,
        },
        "variant": config.material.variant.tag,
        "solver": config.to_dict()["solver"],
        "config": config.to_dict(),
    }
    if result.failure is not None:
        report["failure"] = {
            "code": result.failure.code,
            "message": result.failure.message,
            **result.failure.details,
        }
    return report


def run(config: RunConfig, write_files: bool = True, mesh: Mesh | None = None) -> RunResult:
    """Execute the full load program.

    A StepFailure stops the ramp but does not propagate: the history written
    so far is kept and the failure is recorded in the result and the report.

    Args:
        config: Validated run configuration.
        write_files: Write history, field and report files into ``config.output.directory``.
        mesh: Pre-built mesh to use instead of generating one from ``config.mesh``.

    Returns:
        RunResult with committed records and the exit report.

    Raises:
        ConfigError, GeometryError, ParseError: Before the first step.
    """
    system = build_system(config, mesh)
    result = RunResult(config=config, system=system)
    loading, output = config.loading, config.output
    directory = output.directory
    history = HistoryWriter(directory / output.history) if write_files else None
    last_fields = 0
    try:
        for step in range(1, loading.steps + 1):
            target = step * loading.increment
            try:
                step_report = solve_load_step(system, target, loading.dt)
            except StepFailure as exc:
                result.failure = exc
                break
            record = HistoryRecord(
                step=step,
                u=step_report.u,
                F=step_report.reaction,
                iters=step_report.iterations,
                cutbacks=step_report.cutbacks,
                dissipation=step_report.dissipation,
                maxD=step_report.max_damage,
            )
            result.records.append(record)
            result.penalty_history.append(system.penalty_rms)
            if history is not None:
                history.append(record)
            if write_files and output.fields and output.field_every and step % output.field_every == 0:
                _write_step_fields(system, directory, step)
                last_fields = step
    finally:
        if history is not None:
            history.close()

    committed = len(result.records)
    if write_files and output.fields and committed and last_fields != committed:
        _write_step_fields(system, directory, committed)
    result.report = build_report(result)
    if write_files:
        write_json(result.report, directory / output.report)
    log_event(
        logger, "run_complete", status=result.report["status"], steps=committed,
        peak_force=result.report["peak_force"], u_at_peak=result.report["u_at_peak"],
    )
    return result
