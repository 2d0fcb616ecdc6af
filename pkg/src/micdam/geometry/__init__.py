"""Benchmark mesh generators and the neutral mesh file format."""

from micdam.geometry.generators import (
    DEFAULT_CONSTRAINTS,
    block3d,
    generate,
    graded_fractions,
    notched,
    plate_with_hole,
    strip,
)
from micdam.geometry.meshfile import format_mesh, parse_mesh, read_dimension, read_mesh, write_mesh

__all__ = [
    "DEFAULT_CONSTRAINTS",
    "block3d",
    "format_mesh",
    "generate",
    "graded_fractions",
    "notched",
    "parse_mesh",
    "plate_with_hole",
    "read_dimension",
    "read_mesh",
    "strip",
    "write_mesh",
]
