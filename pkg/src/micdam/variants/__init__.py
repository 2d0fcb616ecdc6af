"""Micromorphic gradient-extensions of the damage tensor."""

from micdam.variants.base import (
    MicromorphicVariant,
    micromorphic_point_forces,
    nonlocal_force,
    nonlocal_force_jacobian,
    tuple_derivative,
    tuple_value,
)
from micdam.variants.models import (
    FullComponents,
    LocalModel,
    PrincipalTraces,
    VolumetricDeviatoric,
    cartesian_structural_tensors,
)
from micdam.variants.registry import get_variant, list_variants, resolve_variant

__all__ = [
    "FullComponents",
    "LocalModel",
    "MicromorphicVariant",
    "PrincipalTraces",
    "VolumetricDeviatoric",
    "cartesian_structural_tensors",
    "get_variant",
    "list_variants",
    "micromorphic_point_forces",
    "nonlocal_force",
    "nonlocal_force_jacobian",
    "resolve_variant",
    "tuple_derivative",
    "tuple_value",
]
