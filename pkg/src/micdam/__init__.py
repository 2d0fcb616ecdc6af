"""Finite strain anisotropic damage simulator with micromorphic regularization."""

from micdam.config import load_config
from micdam.errors import MicdamError
from micdam.sim import calibrate_length_scale, run
from micdam.types import MaterialParams, RunConfig
from micdam.variants import get_variant, list_variants

__all__ = [
    "MaterialParams",
    "MicdamError",
    "RunConfig",
    "calibrate_length_scale",
    "get_variant",
    "list_variants",
    "load_config",
    "run",
    "__version__",
]
__version__ = "1.0.0"
