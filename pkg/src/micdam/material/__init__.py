"""Local anisotropic damage law at a quadrature point."""

from micdam.material.criterion import damage_criterion, flow_direction, inelastic_potential
from micdam.material.energies import (
    degradation_factor,
    elastic_energy_and_forces,
    elastic_tangents,
    free_energy,
    interaction_tensor,
    isotropic_hardening_energy,
    isotropic_hardening_force,
    kinematic_hardening_energy,
    kinematic_hardening_force,
)
from micdam.material.update import local_update, material_tangent, stress_and_projection

__all__ = [
    "damage_criterion",
    "degradation_factor",
    "elastic_energy_and_forces",
    "elastic_tangents",
    "flow_direction",
    "free_energy",
    "inelastic_potential",
    "interaction_tensor",
    "isotropic_hardening_energy",
    "isotropic_hardening_force",
    "kinematic_hardening_energy",
    "kinematic_hardening_force",
    "local_update",
    "material_tangent",
    "stress_and_projection",
]
