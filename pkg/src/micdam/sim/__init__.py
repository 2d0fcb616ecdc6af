"""Simulation driver, result files, post-processing, calibration and studies."""

from micdam.sim.calibration import CalibrationResult, calibrate_length_scale
from micdam.sim.output import read_fields, read_history, write_fields, write_history
from micdam.sim.postprocess import (
    damage_band_width,
    eigen_postprocess,
    element_fields,
    field_difference,
)
from micdam.sim.runner import RunResult, build_system, run, summarize_history
from micdam.sim.studies import anisotropy_sweep, refinement_sweep, viscosity_sweep

__all__ = [
    "CalibrationResult",
    "RunResult",
    "anisotropy_sweep",
    "build_system",
    "calibrate_length_scale",
    "damage_band_width",
    "eigen_postprocess",
    "element_fields",
    "field_difference",
    "read_fields",
    "read_history",
    "refinement_sweep",
    "run",
    "summarize_history",
    "viscosity_sweep",
    "write_fields",
    "write_history",
]
