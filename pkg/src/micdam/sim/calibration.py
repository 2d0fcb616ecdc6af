"""Identification of a uniform internal length scale from a target peak force."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

from micdam.errors import CalibrationError, ConfigError
from micdam.logging import get_logger, log_event
from micdam.sim.runner import run
from micdam.types import RunConfig

logger = get_logger("calibration")

PeakEvaluator = Callable[[RunConfig], float]

DEFAULT_TOLERANCE = 0.005
MAX_RUNS = 12


@dataclass(frozen=True)
class Trial:
    length_scale: float
    peak_force: float
    relative_error: float


@dataclass
class CalibrationResult:
    length_scale: float
    peak_force: float
    reference_peak: float
    trials: list[Trial] = field(default_factory=list)

    def to_dict(self) -> dict[str, object]:
        return {
            "length_scale": self.length_scale,
            "peak_force": self.peak_force,
            "reference_peak": self.reference_peak,
            "runs": len(self.trials),
            "trials": [vars(p) for p in self.trials],
        }


def with_length_scale(config: RunConfig, value: float) -> RunConfig:
    """Same run with every nonlocal field using length scale ``value``."""
    material = config.material
    return replace(config, material=replace(material, length_scale=(value,) * material.n_dbar))


def simulated_peak(config: RunConfig) -> float:
    return run(config, write_files=False).peak_force


def _midpoint(lo: float, hi: float) -> float:
    return math.sqrt(lo * hi) if lo > 0.0 else 0.5 * (lo + hi)


def calibrate_length_scale(
    base: RunConfig,
    reference_peak: float,
    bracket: tuple[float, float],
    evaluator: PeakEvaluator = simulated_peak,
    tolerance: float = DEFAULT_TOLERANCE,
    max_runs: int = MAX_RUNS,
) -> CalibrationResult:
    """Bisect a uniform length scale until the peak force matches ``reference_peak``.

    The base configuration's own length scale is tried first when it lies
    inside the bracket; then both bracket ends; then midpoints (geometric for
    positive brackets).

    Args:
        base: Configuration whose variant is calibrated.
        reference_peak: Target peak force [N].
        bracket: (low, high) length scales [MPa mm^2].
        evaluator: Maps a configuration to its peak force.
        tolerance: Relative peak mismatch accepted.
        max_runs: Budget of evaluator calls.

    Returns:
        CalibrationResult with the accepted value and every trial.

    Raises:
        ConfigError: If the variant has no nonlocal fields or the bracket is invalid.
        CalibrationError: If the bracket has no sign change or the budget runs out.
    """
    if base.material.n_dbar == 0:
        raise ConfigError("the local model has no length scale to calibrate", source="calibration")
    lo, hi = bracket
    if not 0.0 <= lo < hi:
        raise ConfigError(f"invalid bracket {bracket}", source="calibration")
    if reference_peak == 0.0:
        raise ConfigError("reference peak force must be non-zero", source="calibration")

    trials: list[Trial] = []

    def attempt(value: float) -> Trial:
        if len(trials) >= max_runs:
            raise CalibrationError(
                f"no match within {tolerance:.2%} after {max_runs} runs",
                source="calibration",
                details={"trials": [vars(p) for p in trials]},
            )
        peak = evaluator(with_length_scale(base, value))
        result = Trial(value, peak, (peak - reference_peak) / abs(reference_peak))
        trials.append(result)
        log_event(logger, "calibration_trial", run=len(trials), length_scale=value,
                  peak_force=peak, relative_error=result.relative_error)
        return result

    def done(p: Trial) -> CalibrationResult | None:
        if abs(p.relative_error) < tolerance:
            return CalibrationResult(p.length_scale, p.peak_force, reference_peak, trials)
        return None

    current = base.material.length_scale[0]
    if lo <= current <= hi and (accepted := done(attempt(current))):
        return accepted

    low, high = attempt(lo), attempt(hi)
    for p in (low, high):
        if accepted := done(p):
            return accepted
    if (low.relative_error > 0) == (high.relative_error > 0):
        raise CalibrationError(
            f"peak force does not cross {reference_peak:.6g} N in bracket [{lo:g}, {hi:g}]",
            source="calibration",
            details={"trials": [vars(p) for p in trials]},
        )

    while True:
        mid = attempt(_midpoint(low.length_scale, high.length_scale))
        if accepted := done(mid):
            return accepted
        if (mid.relative_error > 0) == (low.relative_error > 0):
            low = mid
        else:
            high = mid
