"""Deterministic structured meshes for the benchmark specimens.

All generators are pure functions of their parameters: no randomization,
identical output on every call.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from micdam.errors import GeometryError
from micdam.fem.mesh import Mesh
from micdam.types import MeshSpec

PLATE_LENGTH = 100.0
PLATE_RADIUS = 50.0
NOTCHED_LENGTH = 100.0
NOTCHED_HEIGHT = 36.0
NOTCH_RADIUS = 5.0
NOTCH_OFFSET = 40.0
NOTCH_SPACING = 20.0
DEFAULT_GRADING = 1.15

# Boundary program per geometry: (controlled constraint, fixed constraints)
DEFAULT_CONSTRAINTS: dict[str, tuple[str, tuple[str, ...]]] = {
    "plate_with_hole": ("top:y", ("left:x", "bottom:y")),
    "notched": ("right:x", ("left:x", "left:y")),
    "strip": ("top:y", ("bottom:y", "left:x")),
    "block3d": ("zmax:z", ("zmin:z", "xmin:x", "ymin:y")),
}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise GeometryError(message, source="geometry")


def graded_fractions(n: int, ratio: float) -> NDArray[np.float64]:
    """n + 1 points in [0, 1]; consecutive segment lengths grow by ``ratio``."""
    _require(n >= 1, "need at least one segment")
    _require(ratio > 0.0, "grading ratio must be positive")
    if abs(ratio - 1.0) < 1.0e-14:
        return np.linspace(0.0, 1.0, n + 1)
    powers = ratio ** np.arange(n + 1)
    fractions = (powers - 1.0) / (powers[-1] - 1.0)
    fractions[-1] = 1.0
    return fractions


def _level_ratio(grading: float, level: int) -> float:
    return float(grading ** (1.0 / 2**level))


def plate_with_hole(
    level: int = 0,
    length: float = PLATE_LENGTH,
    radius: float = PLATE_RADIUS,
    grading: float = DEFAULT_GRADING,
    thickness: float = 1.0,
) -> Mesh:
    """Quarter of a square plate with a central hole, hole centre at the origin.

    The O-grid runs tangentially from the x axis (bottom symmetry edge) to the
    y axis (left symmetry edge) and radially from the hole to the outline,
    with elements graded towards the hole.
    """
    _require(level >= 0, "refinement level must be >= 0")
    _require(length > 0 and radius > 0, "lengths must be positive")
    _require(radius < length, "hole radius must be smaller than the plate half-length")

    m = 8 * 2**level
    n_r = 8 * 2**level
    ratio = _level_ratio(grading, level)
    s = graded_fractions(n_r, ratio)

    t = np.arange(2 * m + 1) / m
    phi = t * math.pi / 4.0
    inner = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    outer = np.where(
        (t <= 1.0)[:, None],
        np.column_stack([np.full_like(t, length), t * length]),
        np.column_stack([(2.0 - t) * length, np.full_like(t, length)]),
    )
    inner[0, 1] = 0.0
    inner[-1, 0] = 0.0

    nodes = (inner[:, None, :] + s[None, :, None] * (outer - inner)[:, None, :]).reshape(-1, 2)
    nodes[: n_r + 1, 1] = 0.0
    nodes[2 * m * (n_r + 1) :, 0] = 0.0

    def node(i: NDArray[np.int64] | int, j: NDArray[np.int64] | int) -> NDArray[np.int64]:
        return np.asarray(i) * (n_r + 1) + np.asarray(j)

    i, j = np.meshgrid(np.arange(2 * m), np.arange(n_r), indexing="ij")
    i, j = i.ravel(), j.ravel()
    elements = np.column_stack([node(i, j), node(i, j + 1), node(i + 1, j + 1), node(i + 1, j)])

    tangential = np.arange(2 * m + 1)
    sets = {
        "hole": node(tangential, 0),
        "bottom": node(0, np.arange(n_r + 1)),
        "left": node(2 * m, np.arange(n_r + 1)),
        "top": node(np.arange(m, 2 * m + 1), n_r),
        "right": node(np.arange(0, m + 1), n_r),
    }
    return Mesh(nodes=nodes, elements=elements, element_type="Q4", node_sets=sets,
                thickness=thickness, grading=ratio)


def _notch_top(center: float, radius: float, height: float) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    def curve(x: NDArray[np.float64]) -> NDArray[np.float64]:
        inside = np.clip(radius**2 - (x - center) ** 2, 0.0, None)
        return height - np.sqrt(inside)
    return curve


def _notch_bottom(center: float, radius: float) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    def curve(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.sqrt(np.clip(radius**2 - (x - center) ** 2, 0.0, None))
    return curve


def notched(
    level: int = 0,
    length: float = NOTCHED_LENGTH,
    height: float = NOTCHED_HEIGHT,
    radius: float = NOTCH_RADIUS,
    notch_offset: float = NOTCH_OFFSET,
    notch_spacing: float = NOTCH_SPACING,
    grading: float = DEFAULT_GRADING,
    thickness: float = 1.0,
) -> Mesh:
    """Asymmetrically notched specimen: semicircular notches in the top and bottom edges.

    The top notch is centred at x = notch_offset, the bottom notch at
    x = notch_offset + notch_spacing. Columns of nodes run vertically between
    the bottom and top boundary curves; notch columns are spaced evenly in
    angle along the arcs and the outer columns are graded towards the notches.
    """
    _require(level >= 0, "refinement level must be >= 0")
    _require(min(length, height, radius) > 0, "lengths must be positive")
    c_top = notch_offset
    c_bot = notch_offset + notch_spacing
    _require(c_top - radius > 0 and c_bot + radius < length, "notches must lie inside the outline")
    _require(c_bot - c_top > 2 * radius, "notches overlap")
    _require(2 * radius < height, "notch radius too large for the specimen height")

    k = 2**level
    segments = (8 * k, 8 * k, 4 * k, 8 * k, 8 * k)
    n_y = 8 * k
    ratio = _level_ratio(grading, level)

    def arc(center: float, n: int) -> NDArray[np.float64]:
        angle = np.linspace(0.0, math.pi, n + 1)
        return center - radius * np.cos(angle)

    left = (c_top - radius) * (1.0 - graded_fractions(segments[0], ratio)[::-1])
    middle = np.linspace(c_top + radius, c_bot - radius, segments[2] + 1)
    right = (c_bot + radius) + (length - c_bot - radius) * graded_fractions(segments[4], ratio)
    columns = np.concatenate([
        left[:-1], arc(c_top, segments[1])[:-1], middle[:-1], arc(c_bot, segments[3])[:-1], right,
    ])
    columns[0], columns[-1] = 0.0, length

    y_top = _notch_top(c_top, radius, height)(columns)
    y_bot = _notch_bottom(c_bot, radius)(columns)
    frac = np.linspace(0.0, 1.0, n_y + 1)
    xs = np.repeat(columns, n_y + 1)
    ys = (y_bot[:, None] + frac[None, :] * (y_top - y_bot)[:, None]).ravel()
    nodes = np.column_stack([xs, ys])

    n_x = len(columns) - 1

    def node(c: NDArray[np.int64] | int, j: NDArray[np.int64] | int) -> NDArray[np.int64]:
        return np.asarray(c) * (n_y + 1) + np.asarray(j)

    c, j = np.meshgrid(np.arange(n_x), np.arange(n_y), indexing="ij")
    c, j = c.ravel(), j.ravel()
    elements = np.column_stack([node(c, j), node(c + 1, j), node(c + 1, j + 1), node(c, j + 1)])

    top_start = segments[0]
    bot_start = segments[0] + segments[1] + segments[2]
    sets = {
        "left": node(0, np.arange(n_y + 1)),
        "right": node(n_x, np.arange(n_y + 1)),
        "bottom": node(np.arange(n_x + 1), 0),
        "top": node(np.arange(n_x + 1), n_y),
        "notch_top": node(np.arange(top_start, top_start + segments[1] + 1), n_y),
        "notch_bottom": node(np.arange(bot_start, bot_start + segments[3] + 1), 0),
    }
    return Mesh(nodes=nodes, elements=elements, element_type="Q4", node_sets=sets,
                thickness=thickness, grading=ratio)


def strip(level: int = 0, width: float = 1.0, height: float = 1.0, thickness: float = 1.0) -> Mesh:
    """Rectangle [0, width] x [0, height] with 2^level x 2^level Q4 elements."""
    _require(level >= 0, "refinement level must be >= 0")
    _require(width > 0 and height > 0, "lengths must be positive")
    n = 2**level
    xs, ys = np.linspace(0.0, width, n + 1), np.linspace(0.0, height, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def node(i: NDArray[np.int64] | int, j: NDArray[np.int64] | int) -> NDArray[np.int64]:
        return np.asarray(i) * (n + 1) + np.asarray(j)

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    elements = np.column_stack([node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)])
    line = np.arange(n + 1)
    sets = {
        "left": node(0, line),
        "right": node(n, line),
        "bottom": node(line, 0),
        "top": node(line, n),
    }
    return Mesh(nodes=nodes, elements=elements, element_type="Q4", node_sets=sets,
                thickness=thickness)


def block3d(
    level: int = 0, width: float = 1.0, height: float = 1.0, depth: float = 1.0
) -> Mesh:
    """Box [0, width] x [0, height] x [0, depth] with 2^level H8 elements per direction."""
    _require(level >= 0, "refinement level must be >= 0")
    _require(min(width, height, depth) > 0, "lengths must be positive")
    n = 2**level
    axes = [np.linspace(0.0, size, n + 1) for size in (width, height, depth)]
    grid = np.meshgrid(*axes, indexing="ij")
    nodes = np.column_stack([g.ravel() for g in grid])

    def node(i: NDArray[np.int64] | int, j: NDArray[np.int64] | int,
             k: NDArray[np.int64] | int) -> NDArray[np.int64]:
        return (np.asarray(i) * (n + 1) + np.asarray(j)) * (n + 1) + np.asarray(k)

    i, j, k = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    elements = np.column_stack([
        node(i, j, k), node(i + 1, j, k), node(i + 1, j + 1, k), node(i, j + 1, k),
        node(i, j, k + 1), node(i + 1, j, k + 1), node(i + 1, j + 1, k + 1), node(i, j + 1, k + 1),
    ])
    ids = np.arange(len(nodes))
    index = np.column_stack([(ids // (n + 1)) // (n + 1), (ids // (n + 1)) % (n + 1), ids % (n + 1)])
    sets = {}
    for axis, label in enumerate("xyz"):
        sets[f"{label}min"] = ids[index[:, axis] == 0]
        sets[f"{label}max"] = ids[index[:, axis] == n]
    return Mesh(nodes=nodes, elements=elements, element_type="H8", node_sets=sets)


def generate(spec: MeshSpec) -> Mesh:
    """Build the mesh described by ``spec`` (reading it from file when ``spec.file`` is set).

    Raises:
        GeometryError: For infeasible parameters or an unknown geometry tag.
    """
    if spec.file is not None:
        from micdam.geometry.meshfile import read_mesh

        mesh = read_mesh(spec.file)
        mesh.thickness = spec.thickness
    elif spec.geometry == "plate_with_hole":
        mesh = plate_with_hole(
            spec.level,
            length=spec.length or PLATE_LENGTH,
            radius=spec.radius or PLATE_RADIUS,
            grading=spec.grading,
            thickness=spec.thickness,
        )
    elif spec.geometry == "notched":
        mesh = notched(
            spec.level,
            length=spec.length or NOTCHED_LENGTH,
            height=spec.height or NOTCHED_HEIGHT,
            radius=spec.radius or NOTCH_RADIUS,
            notch_offset=spec.notch_offset if spec.notch_offset is not None else NOTCH_OFFSET,
            notch_spacing=spec.notch_spacing if spec.notch_spacing is not None else NOTCH_SPACING,
            grading=spec.grading,
            thickness=spec.thickness,
        )
    elif spec.geometry == "strip":
        mesh = strip(
            spec.level,
            width=spec.width or spec.length or 1.0,
            height=spec.height or 1.0,
            thickness=spec.thickness,
        )
    elif spec.geometry == "block3d":
        mesh = block3d(
            spec.level,
            width=spec.width or spec.length or 1.0,
            height=spec.height or 1.0,
            depth=spec.depth or 1.0,
        )
    else:
        raise GeometryError(f"unknown geometry {spec.geometry!r}", source="geometry")
    mesh.validate()
    return mesh
