"""Isoparametric Q4 / H8 shape functions and Gauss quadrature."""

from __future__ import annotations

from functools import cache
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError

ElementType = Literal["Q4", "H8"]

# Local node coordinates: counter-clockwise, bottom face before top face for H8.
NODE_COORDS: dict[str, NDArray[np.float64]] = {
    "Q4": np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]),
    "H8": np.array([
        [-1.0, -1.0, -1.0], [1.0, -1.0, -1.0], [1.0, 1.0, -1.0], [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, 1.0], [-1.0, 1.0, 1.0],
    ]),
}

DIMENSION: dict[str, int] = {"Q4": 2, "H8": 3}


def _node_coords(elem_type: str) -> NDArray[np.float64]:
    try:
        return NODE_COORDS[elem_type]
    except KeyError:
        raise ConfigError(f"unknown element type {elem_type!r}", source="fem") from None


def shape_functions(
    elem_type: ElementType, local_coords: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Values N_a (n_nodes,) and reference gradients dN_a/dxi (n_nodes, dim)."""
    corners = _node_coords(elem_type)
    xi = np.asarray(local_coords, dtype=float)
    factors = 1.0 + corners * xi
    values = np.prod(factors, axis=1) / len(corners)
    dim = corners.shape[1]
    gradients = np.empty_like(corners)
    for k in range(dim):
        others = np.prod(np.delete(factors, k, axis=1), axis=1)
        gradients[:, k] = corners[:, k] * others / len(corners)
    return values, gradients


@cache
def gauss_rule(elem_type: ElementType) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Full 2-point tensor-product Gauss rule: points (n_gp, dim) and weights (n_gp,)."""
    dim = _node_coords(elem_type).shape[1]
    x, w = np.polynomial.legendre.leggauss(2)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    weights = np.prod(np.meshgrid(*([w] * dim), indexing="ij"), axis=0).ravel()
    points = np.column_stack([g.ravel() for g in grids])
    return points, weights


@cache
def tabulate(elem_type: ElementType) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """N (n_gp, n_nodes), dN/dxi (n_gp, n_nodes, dim) and weights at the Gauss points."""
    points, weights = gauss_rule(elem_type)
    pairs = [shape_functions(elem_type, point) for point in points]
    return np.array([v for v, _ in pairs]), np.array([g for _, g in pairs]), weights
