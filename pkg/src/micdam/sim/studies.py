"""Parameter studies built from repeated runs: viscosity, refinement and anisotropy."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import replace
from typing import Any

from micdam.errors import ConfigError
from micdam.geometry.generators import PLATE_LENGTH, PLATE_RADIUS
from micdam.logging import get_logger, log_event
from micdam.sim.postprocess import component, damage_band_width, field_difference
from micdam.sim.runner import RunResult, run
from micdam.types import RunConfig

logger = get_logger("studies")

Runner = Callable[[RunConfig], RunResult]


def _labeled(base: RunConfig, label: str, **material: Any) -> RunConfig:
    output = replace(base.output, directory=base.output.directory / label)
    return replace(base, material=replace(base.material, **material), output=output)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else float("inf")


def _run_entry(result: RunResult) -> dict[str, Any]:
    return {
        "status": result.report["status"],
        "peak_force": result.report["peak_force"],
        "u_at_peak": result.report["u_at_peak"],
        "u_at_half_peak": result.report["u_at_half_peak"],
        "final_force": result.records[-1].F if result.records else 0.0,
        "steps_committed": len(result.records),
    }


def viscosity_sweep(base: RunConfig, viscosities: Sequence[float], runner: Runner = run) -> dict[str, Any]:
    """Runs for every eta_v; damage fields are compared with the first run.

    Raises:
        ConfigError: If no viscosity is given.
    """
    if not viscosities:
        raise ConfigError("viscosity sweep needs at least one eta_v", source="studies")
    runs: list[dict[str, Any]] = []
    reference_D = None
    for eta in viscosities:
        result = runner(_labeled(base, f"eta_{eta:g}", eta_v=float(eta)))
        D = result.system.D.mean(axis=1)
        if reference_D is None:
            reference_D = D
        entry = {"eta_v": float(eta), **_run_entry(result),
                 "field_difference": field_difference(D, reference_D)}
        runs.append(entry)
        log_event(logger, "sweep_run", study="viscosity", **entry)
    peaks = [r["peak_force"] for r in runs]
    spread = (max(peaks) - min(peaks)) / max(abs(p) for p in peaks) if any(peaks) else 0.0
    return {"study": "viscosity", "runs": runs, "peak_spread": spread}


def _band_station(config: RunConfig) -> tuple[int, float | None]:
    if config.mesh.geometry == "plate_with_hole" and config.mesh.file is None:
        length = config.mesh.length or PLATE_LENGTH
        radius = config.mesh.radius or PLATE_RADIUS
        return 1, 0.5 * (length + radius)
    return 1, None


def refinement_sweep(
    base: RunConfig,
    levels: Sequence[int],
    runner: Runner = run,
    damage_component: str = "yy",
    threshold: float = 0.5,
) -> dict[str, Any]:
    """Runs over refinement levels with peak changes and damage band widths.

    The band width is measured across the ligament for the plate with hole
    and over the whole mesh otherwise.
    """
    if not levels:
        raise ConfigError("refinement sweep needs at least one level", source="studies")
    axis, station = _band_station(base)
    runs: list[dict[str, Any]] = []
    for level in levels:
        config = replace(
            base,
            mesh=replace(base.mesh, level=int(level)),
            output=replace(base.output, directory=base.output.directory / f"level_{level}"),
        )
        result = runner(config)
        values = component(result.system.D.mean(axis=1), damage_component)
        entry = {
            "level": int(level),
            "elements": result.system.mesh.n_elements,
            **_run_entry(result),
            "band_width": damage_band_width(result.system.mesh, values, threshold, axis, station),
        }
        runs.append(entry)
        log_event(logger, "sweep_run", study="refinement", **entry)
    changes = [
        _relative(b["peak_force"], a["peak_force"]) for a, b in zip(runs, runs[1:])
    ]
    return {
        "study": "refinement",
        "component": damage_component,
        "threshold": threshold,
        "runs": runs,
        "peak_changes": changes,
    }


def anisotropy_sweep(base: RunConfig, variants: Sequence[str], runner: Runner = run) -> dict[str, Any]:
    """Paired anisotropic (theta = 1) and isotropic (theta = 0) runs per variant."""
    if not variants:
        raise ConfigError("anisotropy sweep needs at least one variant", source="studies")
    length_scale = base.material.length_scale[0] if base.material.length_scale else None
    pairs: list[dict[str, Any]] = []
    for tag in variants:
        material = base.material.with_variant(tag, length_scale=length_scale)
        peaks: dict[str, float] = {}
        for theta, label in ((1.0, "anisotropic"), (0.0, "isotropic")):
            config = replace(
                base,
                material=replace(material, theta=theta),
                output=replace(base.output, directory=base.output.directory / f"{tag}_{label}"),
            )
            result = runner(config)
            peaks[label] = result.report["peak_force"]
            log_event(logger, "sweep_run", study="anisotropy", variant=tag, theta=theta,
                      **_run_entry(result))
        excess = (peaks["isotropic"] - peaks["anisotropic"]) / abs(peaks["anisotropic"]) \
            if peaks["anisotropic"] else float("inf")
        pairs.append({"variant": material.variant.tag, **{f"peak_{k}": v for k, v in peaks.items()},
                      "excess": excess})
    return {"study": "anisotropy", "pairs": pairs}
