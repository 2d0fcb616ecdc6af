"""Spectral calculus and Mandel algebra for symmetric tensors."""

from micdam.tensor.algebra import (
    deviator,
    double_contract,
    norm,
    sym,
    sym_product_operator,
    t23_dyadic,
    trace,
)
from micdam.tensor.mandel import (
    DEVIATORIC4,
    I_MANDEL,
    IDENTITY2,
    IDENTITY4,
    VOLUMETRIC4,
    MandelVector,
    SymTensor2,
    SymTensor4,
    from_mandel,
    to_mandel,
)
from micdam.tensor.spectral import (
    Spectrum,
    contracted_second_derivative,
    isotropic_function,
    isotropic_second_derivative,
    log_projection_second_derivative,
    positive_part,
    positive_part_second_derivative,
    positive_part_with_derivative,
    spectral_decompose,
    tensor_exp,
    tensor_log_strain,
)

__all__ = [
    "DEVIATORIC4",
    "I_MANDEL",
    "IDENTITY2",
    "IDENTITY4",
    "VOLUMETRIC4",
    "MandelVector",
    "Spectrum",
    "SymTensor2",
    "SymTensor4",
    "contracted_second_derivative",
    "deviator",
    "double_contract",
    "from_mandel",
    "isotropic_function",
    "isotropic_second_derivative",
    "log_projection_second_derivative",
    "norm",
    "positive_part",
    "positive_part_second_derivative",
    "positive_part_with_derivative",
    "spectral_decompose",
    "sym",
    "sym_product_operator",
    "t23_dyadic",
    "tensor_exp",
    "tensor_log_strain",
    "to_mandel",
    "trace",
]
