"""Typed records shared across the simulator."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError
from micdam.variants import MicromorphicVariant, get_variant

TangentMode = Literal["analytic", "fd"]
ExecutorKind = Literal["process", "thread"]
GeometryTag = Literal["plate_with_hole", "notched", "strip", "block3d"]

DEFAULT_PENALTY = 1.0e4
DEFAULT_LENGTH_SCALE = 75.0


@dataclass(frozen=True)
class MaterialParams:
    """Constitutive constants of the damage model and the micromorphic extension.

    Defaults reproduce the reference parameter set used by the benchmarks
    (moduli in MPa, ``length_scale`` in MPa mm^2, ``eta_v`` in MPa s).
    ``penalty`` and ``length_scale`` hold one value per nonlocal field; when
    empty they are filled uniformly for the chosen variant.
    """

    mu: float = 55000.0
    bulk_modulus: float = 185000.0 / 3.0
    theta: float = 1.0
    e_d: float = 1.0
    Y0: float = 2.5
    c_d: float = 1.0
    H_d: float = 1.0
    r_d: float = 5.0
    s_d: float = 100.0
    K_h: float = 0.1
    n_h: float = 2.0
    a_h: float = 0.999999
    eta_v: float = 1.0
    variant: MicromorphicVariant = field(default_factory=lambda: get_variant("B"))
    penalty: tuple[float, ...] = ()
    length_scale: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        n = self.variant.n_dbar
        if not self.penalty:
            object.__setattr__(self, "penalty", (DEFAULT_PENALTY,) * n)
        if not self.length_scale:
            object.__setattr__(self, "length_scale", (DEFAULT_LENGTH_SCALE,) * n)
        object.__setattr__(self, "penalty", tuple(float(v) for v in self.penalty))
        object.__setattr__(self, "length_scale", tuple(float(v) for v in self.length_scale))
        self.validate()

    def validate(self) -> None:
        checks = (
            (self.mu > 0, "mu must be positive"),
            (self.bulk_modulus > 0, "bulk_modulus must be positive"),
            (self.Y0 > 0, "Y0 must be positive"),
            (self.eta_v > 0, "eta_v must be positive"),
            (self.s_d > 0, "s_d must be positive"),
            (self.n_h > 1, "n_h must exceed 1"),
            (0 < self.a_h < 1, "a_h must lie in (0, 1)"),
            (0 <= self.theta <= 1, "theta must lie in [0, 1]"),
            (self.e_d > 0, "e_d must be positive"),
            (self.c_d > 0, "c_d must be positive"),
            (self.H_d >= 0 and self.r_d >= 0 and self.K_h >= 0, "hardening moduli must be >= 0"),
            (len(self.penalty) == self.variant.n_dbar, "penalty needs one value per nonlocal field"),
            (
                len(self.length_scale) == self.variant.n_dbar,
                "length_scale needs one value per nonlocal field",
            ),
            (all(h > 0 for h in self.penalty), "penalty moduli must be positive"),
            (all(a >= 0 for a in self.length_scale), "length scales must be >= 0"),
        )
        for ok, message in checks:
            if not ok:
                raise ConfigError(message, source="material")

    @property
    def n_dbar(self) -> int:
        return self.variant.n_dbar

    @property
    def H(self) -> NDArray[np.float64]:
        return np.asarray(self.penalty, dtype=float)

    @property
    def A(self) -> NDArray[np.float64]:
        return np.asarray(self.length_scale, dtype=float)

    def with_variant(self, tag: str, length_scale: float | None = None) -> MaterialParams:
        """Same constants with another variant; per-field moduli are re-filled uniformly."""
        variant = get_variant(tag)
        n = variant.n_dbar
        H = self.penalty[0] if self.penalty else DEFAULT_PENALTY
        A = length_scale if length_scale is not None else (
            self.length_scale[0] if self.length_scale else DEFAULT_LENGTH_SCALE
        )
        return replace(self, variant=variant, penalty=(H,) * n, length_scale=(A,) * n)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = value.tag if f.name == "variant" else (
                list(value) if isinstance(value, tuple) else value
            )
        return data


@dataclass(frozen=True)
class GaussPointState:
    """Converged internal variables at one quadrature point."""

    D: NDArray[np.float64] = field(default_factory=lambda: np.zeros((3, 3)))
    xi_d: float = 0.0
    dissipation_increment: float = 0.0


@dataclass(frozen=True)
class LocalUpdateResult:
    """Outcome of the implicit local update and its consistent tangents.

    Tensor-valued tangents are Mandel arrays: ``C_alpha_eta`` is 6x6,
    ``dalpha_ddbar`` and ``dd_deta`` are (n_dbar, 6) stacks, ``dd_ddbar``
    is (n_dbar, n_dbar).
    """

    state_new: GaussPointState
    alpha: NDArray[np.float64]
    d_local: NDArray[np.float64]
    C_alpha_eta: NDArray[np.float64]
    dalpha_ddbar: NDArray[np.float64]
    dd_deta: NDArray[np.float64]
    dd_ddbar: NDArray[np.float64]
    delta_gamma: float = 0.0
    driving_force: NDArray[np.float64] = field(default_factory=lambda: np.zeros((3, 3)))
    criterion: float = 0.0
    iterations: int = 0

    @property
    def inelastic(self) -> bool:
        return self.delta_gamma > 0.0


@dataclass(frozen=True)
class MeshSpec:
    """Parameters of a generated benchmark mesh (lengths in mm)."""

    geometry: GeometryTag = "plate_with_hole"
    level: int = 0
    thickness: float = 1.0
    length: float | None = None
    height: float | None = None
    width: float | None = None
    depth: float | None = None
    radius: float | None = None
    notch_offset: float | None = None
    notch_spacing: float | None = None
    grading: float = 1.15
    file: Path | None = None

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["file"] = str(self.file) if self.file is not None else None
        return data


@dataclass(frozen=True)
class LoadingProgram:
    """Displacement-controlled ramp applied to a node set along one axis."""

    target: float = 1.0
    steps: int = 50
    rate: float = 1.0
    control: str | None = None
    fixed: tuple[str, ...] | None = None

    @property
    def increment(self) -> float:
        return self.target / self.steps

    @property
    def dt(self) -> float:
        return abs(self.increment) / self.rate


@dataclass(frozen=True)
class SolverSettings:
    force_tol: float = 1.0e-8
    energy_tol: float = 1.0e-10
    max_iterations: int = 25
    max_cutbacks: int = 8
    tangent: TangentMode = "analytic"
    local_tol: float = 1.0e-10
    local_max_iterations: int = 50
    threads: int = 1
    executor: ExecutorKind = "process"


@dataclass(frozen=True)
class OutputSettings:
    directory: Path = Path("out")
    history: str = "history.csv"
    field_every: int = 0
    fields: bool = True
    report: str = "report.json"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one simulation."""

    mesh: MeshSpec = field(default_factory=MeshSpec)
    material: MaterialParams = field(default_factory=MaterialParams)
    loading: LoadingProgram = field(default_factory=LoadingProgram)
    solver: SolverSettings = field(default_factory=SolverSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def to_dict(self) -> dict[str, Any]:
        loading = asdict(self.loading)
        loading["fixed"] = list(self.loading.fixed) if self.loading.fixed is not None else None
        output = asdict(self.output)
        output["directory"] = str(self.output.directory)
        return {
            "mesh": self.mesh.to_dict(),
            "material": self.material.to_dict(),
            "loading": loading,
            "solver": asdict(self.solver),
            "output": output,
        }


@dataclass(frozen=True)
class HistoryRecord:
    """One committed load step of a force-displacement history."""

    step: int
    u: float
    F: float
    iters: int
    cutbacks: int
    dissipation: float
    maxD: float


@dataclass(frozen=True)
class StepReport:
    """Diagnostics of one converged (possibly cut back) load step."""

    u: float
    reaction: float
    iterations: int
    cutbacks: int
    dissipation: float
    max_damage: float
    residual_norms: tuple[float, ...] = ()
