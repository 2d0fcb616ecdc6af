"""Dirichlet conditions written as ``"set:axis"`` strings."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError
from micdam.fem.mesh import DofMap, Mesh, parse_axis


@dataclass(frozen=True)
class Constraint:
    node_set: str
    axis: int

    @classmethod
    def parse(cls, text: str) -> Constraint:
        name, sep, axis = text.partition(":")
        if not sep or not name.strip():
            raise ConfigError(f"constraint {text!r} must look like 'set:axis'", source="boundary")
        return cls(node_set=name.strip(), axis=parse_axis(axis))

    def __str__(self) -> str:
        return f"{self.node_set}:{'xyz'[self.axis]}"


@dataclass(frozen=True)
class BoundaryConditions:
    """Controlled DOFs follow the displacement ramp; fixed DOFs stay at zero."""

    control: Constraint
    fixed: tuple[Constraint, ...]
    controlled_dofs: NDArray[np.int64]
    fixed_dofs: NDArray[np.int64]

    @property
    def prescribed_dofs(self) -> NDArray[np.int64]:
        return np.concatenate([self.controlled_dofs, self.fixed_dofs])

    def free_dofs(self, total: int) -> NDArray[np.int64]:
        mask = np.ones(total, dtype=bool)
        mask[self.prescribed_dofs] = False
        return np.flatnonzero(mask)


def build_boundary_conditions(
    mesh: Mesh, dofmap: DofMap, control: str, fixed: Sequence[str]
) -> BoundaryConditions:
    """Resolve constraint strings against the mesh node sets.

    Raises:
        ConfigError: Unknown sets or axes, or a DOF both controlled and fixed.
    """
    control_c = Constraint.parse(control)
    fixed_c = tuple(Constraint.parse(text) for text in fixed)
    controlled = np.unique(
        dofmap.displacement_dofs(mesh.node_set(control_c.node_set), control_c.axis)
    )
    fixed_dofs = np.unique(np.concatenate([
        dofmap.displacement_dofs(mesh.node_set(c.node_set), c.axis) for c in fixed_c
    ])) if fixed_c else np.zeros(0, dtype=np.int64)
    if np.intersect1d(controlled, fixed_dofs).size:
        raise ConfigError(
            f"constraint {control_c} overlaps the fixed constraints", source="boundary"
        )
    return BoundaryConditions(
        control=control_c,
        fixed=fixed_c,
        controlled_dofs=controlled,
        fixed_dofs=fixed_dofs.astype(np.int64),
    )
