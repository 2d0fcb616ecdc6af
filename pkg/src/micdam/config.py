"""Run configuration: TOML file + ``--override section.key=value`` flags.

Resolution order: defaults baked into the dataclasses in :mod:`micdam.types`,
then the config file, then overrides.
"""

from __future__ import annotations

import tomllib
from collections.abc import Callable, Mapping, Sequence
from pathlib import Path
from typing import Any

from micdam.errors import ConfigError, MicdamError
from micdam.fem.boundary import Constraint
from micdam.geometry.generators import DEFAULT_CONSTRAINTS
from micdam.geometry.meshfile import read_dimension
from micdam.logging import get_logger, log_event
from micdam.types import (
    LoadingProgram,
    MaterialParams,
    MeshSpec,
    OutputSettings,
    RunConfig,
    SolverSettings,
)
from micdam.variants import get_variant

SECTIONS = ("mesh", "material", "loading", "solver", "output")
GEOMETRIES = ("plate_with_hole", "notched", "strip", "block3d")

logger = get_logger("config")

Raw = dict[str, dict[str, Any]]


def _fail(section: str, key: str, message: str) -> ConfigError:
    return ConfigError(f"[{section}] {key}: {message}", source="config",
                       details={"section": section, "key": key})


def _number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise _fail(section, key, f"expected a number, got {value!r}")
    return float(value)


def _integer(section: str, key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(section, key, f"expected an integer, got {value!r}")
    return value


def _boolean(section: str, key: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise _fail(section, key, f"expected true/false, got {value!r}")
    return value


def _string(section: str, key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise _fail(section, key, f"expected a string, got {value!r}")
    return value


def _numbers(section: str, key: str, value: Any) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise _fail(section, key, f"expected a list of numbers, got {value!r}")
    return tuple(_number(section, key, v) for v in value)


def _strings(section: str, key: str, value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        return (value,)
    if not isinstance(value, list):
        raise _fail(section, key, f"expected a list of strings, got {value!r}")
    return tuple(_string(section, key, v) for v in value)


Converter = Callable[[str, str, Any], Any]

# Accepted keys per section and how to convert them.
SCHEMA: dict[str, dict[str, Converter]] = {
    "mesh": {
        "geometry": _string, "level": _integer, "thickness": _number, "file": _string,
        "length": _number, "height": _number, "width": _number, "depth": _number,
        "radius": _number, "notch_radius": _number, "notch_offset": _number,
        "notch_spacing": _number, "grading": _number,
    },
    "material": {
        **{name: _number for name in (
            "mu", "bulk_modulus", "theta", "e_d", "Y0", "c_d", "H_d", "r_d", "s_d",
            "K_h", "n_h", "a_h", "eta_v", "penalty", "length_scale",
        )},
        "variant": _string,
        "penalty_components": _numbers,
        "length_scale_components": _numbers,
    },
    "loading": {
        "target": _number, "steps": _integer, "rate": _number,
        "control": _string, "fixed": _strings,
    },
    "solver": {
        "force_tol": _number, "energy_tol": _number, "max_iterations": _integer,
        "max_cutbacks": _integer, "tangent": _string, "local_tol": _number,
        "local_max_iterations": _integer, "threads": _integer, "executor": _string,
    },
    "output": {
        "directory": _string, "history": _string, "field_every": _integer,
        "fields": _boolean, "report": _string,
    },
}


def parse_value(text: str) -> Any:
    """Interpret an override value as a TOML literal, falling back to a bare string."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text.strip()


def parse_override(text: str) -> tuple[str, str, Any]:
    """Split ``section.key=value``.

    Raises:
        ConfigError: If the flag is not of that form.
    """
    target, sep, value = text.partition("=")
    section, dot, key = target.strip().partition(".")
    if not sep or not dot or not section or not key:
        raise ConfigError(
            f"override {text!r} must look like section.key=value", source="config"
        )
    return section, key, parse_value(value)


def apply_overrides(raw: Raw, overrides: Sequence[str]) -> Raw:
    """Return a copy of ``raw`` with every override applied in order."""
    merged = {section: dict(values) for section, values in raw.items()}
    for text in overrides:
        section, key, value = parse_override(text)
        merged.setdefault(section, {})[key] = value
    return merged


def read_raw(path: str | Path) -> Raw:
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}", source="config") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}", source="config") from exc
    for section, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError(f"top-level key {section!r} must be a [section]", source="config")
    return data


def _convert(raw: Raw) -> Raw:
    converted: Raw = {section: {} for section in SECTIONS}
    for section, values in raw.items():
        if section not in SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; expected one of {', '.join(SECTIONS)}",
                source="config",
            )
        schema = SCHEMA[section]
        for key, value in values.items():
            if key not in schema:
                raise _fail(section, key, "unknown key")
            converted[section][key] = schema[key](section, key, value)
    return converted


def _require(ok: bool, section: str, key: str, message: str) -> None:
    if not ok:
        raise _fail(section, key, message)


def _mesh(values: dict[str, Any], base_dir: Path) -> MeshSpec:
    values = dict(values)
    if "notch_radius" in values:
        values["radius"] = values.pop("notch_radius")
    if "file" in values:
        file = Path(values["file"])
        if not file.is_absolute():
            file = base_dir / file
        _require(file.is_file(), "mesh", "file", f"mesh file {file} does not exist")
        values["file"] = file
    geometry = values.get("geometry", MeshSpec.geometry)
    _require(geometry in GEOMETRIES, "mesh", "geometry", f"expected one of {', '.join(GEOMETRIES)}")
    _require(values.get("level", 0) >= 0, "mesh", "level", "must be >= 0")
    _require(values.get("thickness", 1.0) > 0, "mesh", "thickness", "must be positive")
    for key in ("length", "height", "width", "depth", "radius", "grading"):
        if key in values:
            _require(values[key] > 0, "mesh", key, "must be positive")
    return MeshSpec(**values)


def _material(values: dict[str, Any]) -> MaterialParams:
    values = dict(values)
    variant = get_variant(values.pop("variant", "B"))
    n = variant.n_dbar
    penalty = values.pop("penalty_components", None)
    length_scale = values.pop("length_scale_components", None)
    if "penalty" in values:
        uniform = values.pop("penalty")
        penalty = penalty if penalty is not None else (uniform,) * n
    if "length_scale" in values:
        uniform = values.pop("length_scale")
        length_scale = length_scale if length_scale is not None else (uniform,) * n
    return MaterialParams(
        variant=variant, penalty=penalty or (), length_scale=length_scale or (), **values
    )


def _loading(values: dict[str, Any], mesh: MeshSpec) -> LoadingProgram:
    values = dict(values)
    _require(values.get("steps", 1) >= 1, "loading", "steps", "must be >= 1")
    _require(values.get("target", 1.0) != 0.0, "loading", "target", "must be non-zero")
    _require(values.get("rate", 1.0) > 0.0, "loading", "rate", "must be positive")
    if mesh.file is None:
        control, fixed = DEFAULT_CONSTRAINTS[mesh.geometry]
        values.setdefault("control", control)
        values.setdefault("fixed", fixed)
        dim = 3 if mesh.geometry == "block3d" else 2
    else:
        _require("control" in values, "loading", "control", "required when the mesh is read from file")
        values.setdefault("fixed", ())
        dim = read_dimension(mesh.file)
    for key, entries in (("control", (values["control"],)), ("fixed", values["fixed"])):
        for entry in entries:
            _require(Constraint.parse(entry).axis < dim, "loading", key,
                     f"axis of {entry!r} invalid for a {dim}D mesh")
    return LoadingProgram(**values)


def _solver(values: dict[str, Any]) -> SolverSettings:
    for key in ("force_tol", "energy_tol", "local_tol"):
        if key in values:
            _require(values[key] > 0, "solver", key, "must be positive")
    for key in ("max_iterations", "local_max_iterations", "threads"):
        if key in values:
            _require(values[key] >= 1, "solver", key, "must be >= 1")
    _require(values.get("max_cutbacks", 0) >= 0, "solver", "max_cutbacks", "must be >= 0")
    _require(values.get("tangent", "analytic") in ("analytic", "fd"), "solver", "tangent",
             "expected 'analytic' or 'fd'")
    _require(values.get("executor", "process") in ("process", "thread"), "solver", "executor",
             "expected 'process' or 'thread'")
    return SolverSettings(**values)


def _output(values: dict[str, Any]) -> OutputSettings:
    values = dict(values)
    if "directory" in values:
        values["directory"] = Path(values["directory"])
    _require(values.get("field_every", 0) >= 0, "output", "field_every", "must be >= 0")
    return OutputSettings(**values)


def build_config(raw: Mapping[str, Mapping[str, Any]], base_dir: Path | None = None) -> RunConfig:
    """Validate a raw section mapping and build the typed RunConfig.

    Raises:
        ConfigError: Unknown section/key, wrong value type or violated bound.
    """
    values = _convert({section: dict(entries) for section, entries in raw.items()})
    try:
        mesh = _mesh(values["mesh"], base_dir or Path.cwd())
        return RunConfig(
            mesh=mesh,
            material=_material(values["material"]),
            loading=_loading(values["loading"], mesh),
            solver=_solver(values["solver"]),
            output=_output(values["output"]),
        )
    except MicdamError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(exc.message, source="config", details=exc.details) from exc


def load_config(path: str | Path | None = None, overrides: Sequence[str] = ()) -> RunConfig:
    """Load defaults, then the config file (if any), then the overrides.

    Args:
        path: TOML file; ``None`` uses only the built-in defaults.
        overrides: ``section.key=value`` strings applied after the file.

    Returns:
        The validated RunConfig.

    Raises:
        ConfigError: If the file is unreadable or any value is invalid.
    """
    raw: Raw = read_raw(path) if path is not None else {}
    raw = apply_overrides(raw, overrides)
    base_dir = Path(path).parent if path is not None else Path.cwd()
    config = build_config(raw, base_dir)
    log_event(
        logger, "config_loaded",
        path=str(path) if path is not None else None,
        overrides=list(overrides),
        variant=config.material.variant.tag,
        geometry=config.mesh.geometry,
        mesh_level=config.mesh.level,
        solver=config.to_dict()["solver"],
    )
    return config
