"""Exception family shared by all micdam modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar


@dataclass
class MicdamError(Exception):
    """Base error carrying a message, the raising component and a machine-readable code."""

    message: str
    source: str = "micdam"
    details: dict[str, Any] = field(default_factory=dict)

    code: ClassVar[str] = "internal"

    def __str__(self) -> str:
        return f"{self.code} ({self.source}): {self.message}"

    def __reduce__(self) -> tuple[Any, ...]:
        # worker processes send errors back by pickling
        return (type(self), (self.message, self.source, self.details))


class InvalidTensor(MicdamError):
    """Tensor input with non-finite entries or a wrong shape."""

    code = "invalid_tensor"


class DomainError(MicdamError):
    """Scalar function evaluated outside its domain at an eigenvalue."""

    code = "domain"


class NonPositiveDefinite(MicdamError):
    """Right Cauchy-Green tensor lost positive definiteness (element inversion)."""

    code = "non_positive_definite"


class StateOutOfRange(MicdamError):
    """Damage state left its admissible range."""

    code = "state_out_of_range"


class LocalDivergence(MicdamError):
    """Quadrature point Newton iteration did not converge."""

    code = "local_divergence"


class GlobalDivergence(MicdamError):
    """Global Newton iteration did not reach the residual tolerances."""

    code = "global_divergence"


class ConfigError(MicdamError):
    """Invalid or inconsistent configuration."""

    code = "config"


class SingularSystem(MicdamError):
    """Global linear system could not be factorized or solved."""

    code = "singular"


class StepFailure(MicdamError):
    """Load step failed after all cut-backs were exhausted."""

    code = "step_failure"


class GeometryError(MicdamError):
    """Infeasible mesh generation parameters."""

    code = "geometry"


class ParseError(MicdamError):
    """Malformed mesh file."""

    code = "parse"


class CalibrationError(MicdamError):
    """Length-scale calibration could not bracket or reach the target."""

    code = "calibration"


# Failures local to one load step; the step driver retries them with a smaller increment.
RECOVERABLE: tuple[type[MicdamError], ...] = (
    InvalidTensor,
    DomainError,
    NonPositiveDefinite,
    StateOutOfRange,
    LocalDivergence,
    GlobalDivergence,
    SingularSystem,
)


def is_recoverable(error: BaseException) -> bool:
    """Return True if a step cut-back may cure the error."""
    return isinstance(error, RECOVERABLE)


EXIT_CODES: dict[str, int] = {
    ConfigError.code: 1,
    GeometryError.code: 1,
    ParseError.code: 1,
    StepFailure.code: 2,
    CalibrationError.code: 3,
}


def exit_code_for(error: MicdamError) -> int:
    """Map an error to the CLI exit code (4 for anything unexpected)."""
    return EXIT_CODES.get(error.code, 4)
