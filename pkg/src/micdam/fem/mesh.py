"""Mesh container and the node-major degree-of-freedom map."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError, GeometryError
from micdam.fem.shape import DIMENSION, ElementType, tabulate

AXES: dict[str, int] = {"x": 0, "y": 1, "z": 2}


@dataclass
class Mesh:
    """Reference configuration: coordinates [mm], connectivity and named node sets."""

    nodes: NDArray[np.float64]
    elements: NDArray[np.int64]
    element_type: ElementType
    node_sets: dict[str, NDArray[np.int64]] = field(default_factory=dict)
    thickness: float = 1.0
    grading: float | None = None

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = np.asarray(self.elements, dtype=np.int64)
        self.node_sets = {
            name: np.asarray(ids, dtype=np.int64) for name, ids in self.node_sets.items()
        }

    @property
    def dim(self) -> int:
        return DIMENSION[self.element_type]

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_elements(self) -> int:
        return int(self.elements.shape[0])

    def node_set(self, name: str) -> NDArray[np.int64]:
        try:
            return self.node_sets[name]
        except KeyError:
            raise ConfigError(
                f"unknown node set {name!r}; mesh has {', '.join(sorted(self.node_sets))}",
                source="mesh",
            ) from None

    def jacobians(self) -> NDArray[np.float64]:
        """det J at every Gauss point, shape (n_elements, n_gp)."""
        _, dN, _ = tabulate(self.element_type)
        X = self.nodes[self.elements]
        J = np.einsum("eai,gaj->egij", X, dN)
        return np.asarray(np.linalg.det(J), dtype=float)

    def validate(self) -> None:
        if self.nodes.ndim != 2 or self.nodes.shape[1] != self.dim:
            raise GeometryError(
                f"{self.element_type} mesh needs {self.dim}D coordinates", source="mesh"
            )
        n_corner = 4 if self.element_type == "Q4" else 8
        if self.elements.ndim != 2 or self.elements.shape[1] != n_corner:
            raise GeometryError(f"{self.element_type} elements need {n_corner} nodes", source="mesh")
        if self.elements.size and (self.elements.min() < 0 or self.elements.max() >= self.n_nodes):
            raise GeometryError("connectivity references missing nodes", source="mesh")
        for name, ids in self.node_sets.items():
            if ids.size and (ids.min() < 0 or ids.max() >= self.n_nodes):
                raise GeometryError(f"node set {name!r} references missing nodes", source="mesh")
        if self.n_elements:
            detJ = self.jacobians()
            if detJ.min() <= 0.0:
                bad = int(np.argmin(detJ.min(axis=1)))
                raise GeometryError(
                    f"non-positive Jacobian in element {bad}",
                    source="mesh",
                    details={"element": bad, "detJ": float(detJ.min())},
                )

    def volume(self) -> float:
        _, _, weights = tabulate(self.element_type)
        return float(np.sum(self.jacobians() @ weights) * (self.thickness if self.dim == 2 else 1.0))


@dataclass(frozen=True)
class DofMap:
    """Node-major numbering: [u_1..u_dim, dbar_1..dbar_n] for every node."""

    n_nodes: int
    dim: int
    n_dbar: int

    @property
    def per_node(self) -> int:
        return self.dim + self.n_dbar

    @property
    def total(self) -> int:
        return self.n_nodes * self.per_node

    def displacement_dofs(self, nodes: NDArray[np.int64], axis: int) -> NDArray[np.int64]:
        if not 0 <= axis < self.dim:
            raise ConfigError(f"axis {axis} invalid for a {self.dim}D mesh", source="dofs")
        return np.asarray(nodes, dtype=np.int64) * self.per_node + axis

    def element_dofs(self, connectivity: NDArray[np.int64]) -> NDArray[np.int64]:
        """Global DOFs of each element, shape (n_elements, n_nodes_per_element * per_node)."""
        conn = np.asarray(connectivity, dtype=np.int64)
        local = np.arange(self.per_node, dtype=np.int64)
        return (conn[..., None] * self.per_node + local).reshape(conn.shape[0], -1)

    def split(self, U: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Nodal displacements (n_nodes, dim) and nonlocal fields (n_nodes, n_dbar)."""
        nodal = U.reshape(self.n_nodes, self.per_node)
        return nodal[:, : self.dim], nodal[:, self.dim :]


def parse_axis(token: str) -> int:
    token = token.strip().lower()
    if token in AXES:
        return AXES[token]
    if token.isdigit():
        return int(token)
    raise ConfigError(f"unknown axis {token!r}", source="dofs")
