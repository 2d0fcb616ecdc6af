"""Variant registry and tag alias resolution."""

from micdam.errors import ConfigError
from micdam.variants.base import MicromorphicVariant
from micdam.variants.models import (
    FullComponents,
    LocalModel,
    PrincipalTraces,
    VolumetricDeviatoric,
)

# Variant tags: accepted name -> canonical tag
VARIANT_ALIASES: dict[str, str] = {
    "A": "A",
    "full": "A",
    "B": "B",
    "traces": "B",
    "C": "C",
    "voldev": "C",
    "local": "local",
    "none": "local",
}

_VARIANT_CLASSES: dict[str, type[MicromorphicVariant]] = {
    "A": FullComponents,
    "B": PrincipalTraces,
    "C": VolumetricDeviatoric,
    "local": LocalModel,
}

_LOOKUP = {name.upper(): tag for name, tag in VARIANT_ALIASES.items()}


def resolve_variant(tag: str) -> str:
    """Resolve a variant name or alias to its canonical tag.

    Args:
        tag: Variant tag as written in a config file or on the command line.

    Returns:
        One of "A", "B", "C", "local".

    Raises:
        ConfigError: If the tag is unknown.
    """
    canonical = _LOOKUP.get(tag.strip().upper())
    if canonical is None:
        raise ConfigError(
            f"Unknown variant: {tag}. Use one of: {', '.join(list_variants())}",
            source="registry",
        )
    return canonical


def get_variant(tag: str) -> MicromorphicVariant:
    """Instantiate the variant for a tag (model A with Cartesian structural tensors)."""
    variant: MicromorphicVariant = _VARIANT_CLASSES[resolve_variant(tag)]()
    return variant


def list_variants() -> list[str]:
    """Canonical variant tags in registry order."""
    return list(_VARIANT_CLASSES)
