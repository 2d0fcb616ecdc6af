"""Coupled displacement/micromorphic finite elements and the load-step solver."""

from micdam.fem.assembly import SparsityPattern, assemble_results, linear_solve
from micdam.fem.boundary import BoundaryConditions, Constraint, build_boundary_conditions
from micdam.fem.element import ElementResult, ElementSettings, element_residual_tangent
from micdam.fem.mesh import DofMap, Mesh, parse_axis
from micdam.fem.shape import gauss_rule, shape_functions, tabulate
from micdam.fem.solver import CoupledSystem, assemble, reaction_force, solve_load_step

__all__ = [
    "BoundaryConditions",
    "Constraint",
    "CoupledSystem",
    "DofMap",
    "ElementResult",
    "ElementSettings",
    "Mesh",
    "SparsityPattern",
    "assemble",
    "assemble_results",
    "build_boundary_conditions",
    "element_residual_tangent",
    "gauss_rule",
    "linear_solve",
    "parse_axis",
    "reaction_force",
    "shape_functions",
    "solve_load_step",
    "tabulate",
]
