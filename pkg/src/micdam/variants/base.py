"""Micromorphic variant interface and the variant-agnostic force routines."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError
from micdam.tensor import SymTensor2, SymTensor4, to_mandel


class MicromorphicVariant(ABC):
    """A choice of damage-tensor invariants d(D) that receive nonlocal counterparts."""

    tag: str
    n_dbar: int
    description: str = ""

    @abstractmethod
    def tuple_value(self, D: SymTensor2) -> NDArray[np.float64]:
        """Local tuple d(D), shape (n_dbar,)."""
        ...

    @abstractmethod
    def tuple_derivative(self, D: SymTensor2) -> list[SymTensor2]:
        """Symmetric tensors dd_i/dD."""
        ...

    @abstractmethod
    def tuple_hessian(self, D: SymTensor2) -> list[SymTensor4]:
        """Mandel matrices d^2 d_i / dD^2."""
        ...

    def derivative_mandel(self, D: SymTensor2) -> NDArray[np.float64]:
        """dd_i/dD stacked as Mandel rows, shape (n_dbar, 6)."""
        if self.n_dbar == 0:
            return np.zeros((0, 6))
        return np.array([to_mandel(G) for G in self.tuple_derivative(D)])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(tag={self.tag!r}, n_dbar={self.n_dbar})"


def _check_size(variant: MicromorphicVariant, values: Sequence[float] | NDArray[np.float64],
                what: str) -> NDArray[np.float64]:
    array = np.asarray(values, dtype=float)
    if array.shape[:1] != (variant.n_dbar,):
        raise ConfigError(
            f"{what} has {array.shape[0] if array.ndim else 0} entries, "
            f"variant {variant.tag} needs {variant.n_dbar}",
            source="variants",
        )
    return array


def tuple_value(variant: MicromorphicVariant, D: SymTensor2) -> NDArray[np.float64]:
    return variant.tuple_value(D)


def tuple_derivative(variant: MicromorphicVariant, D: SymTensor2) -> list[SymTensor2]:
    return variant.tuple_derivative(D)


def nonlocal_force(
    variant: MicromorphicVariant,
    D: SymTensor2,
    dbar: Sequence[float] | NDArray[np.float64],
    H: Sequence[float] | NDArray[np.float64],
) -> SymTensor2:
    """Y_dbar = sum_i H_i (d_i - dbar_i) dd_i/dD."""
    dbar_arr = _check_size(variant, dbar, "dbar")
    H_arr = _check_size(variant, H, "penalty moduli")
    Y = np.zeros((3, 3))
    if variant.n_dbar == 0:
        return Y
    d = variant.tuple_value(D)
    for weight, G in zip(H_arr * (d - dbar_arr), variant.tuple_derivative(D), strict=True):
        Y += weight * G
    return Y


def nonlocal_force_jacobian(
    variant: MicromorphicVariant,
    D: SymTensor2,
    dbar: NDArray[np.float64],
    H: NDArray[np.float64],
) -> tuple[SymTensor4, NDArray[np.float64]]:
    """dY_dbar/dD (6x6 Mandel) and dY_dbar/d(dbar_j) (n_dbar x 6 Mandel rows)."""
    if variant.n_dbar == 0:
        return np.zeros((6, 6)), np.zeros((0, 6))
    d = variant.tuple_value(D)
    G = variant.derivative_mandel(D)
    jac = (G.T * H) @ G
    for weight, hess in zip(H * (d - dbar), variant.tuple_hessian(D), strict=True):
        jac += weight * hess
    return jac, -(G * H[:, None])


def micromorphic_point_forces(
    variant: MicromorphicVariant,
    D: SymTensor2,
    dbar: Sequence[float] | NDArray[np.float64],
    grad_dbar: NDArray[np.float64],
    H: Sequence[float] | NDArray[np.float64],
    A: Sequence[float] | NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Generalized stresses xi_0 = H (dbar - d) and Xi_0 = A grad(dbar)."""
    dbar_arr = _check_size(variant, dbar, "dbar")
    grad = _check_size(variant, grad_dbar, "grad_dbar")
    H_arr = _check_size(variant, H, "penalty moduli")
    A_arr = _check_size(variant, A, "length scales")
    xi = H_arr * (dbar_arr - variant.tuple_value(D))
    Xi = A_arr[:, None] * grad if variant.n_dbar else np.zeros_like(grad)
    return xi, Xi
