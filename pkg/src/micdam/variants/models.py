"""The concrete micromorphic tuples."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError
from micdam.tensor import (
    DEVIATORIC4,
    IDENTITY2,
    IDENTITY4,
    SymTensor2,
    SymTensor4,
    deviator,
    sym,
    sym_product_operator,
    trace,
)
from micdam.variants.base import MicromorphicVariant


def cartesian_structural_tensors() -> tuple[NDArray[np.float64], ...]:
    """e1e1, e2e2, e3e3, e1e2, e1e3, e2e3 (shear dyads kept non-symmetric)."""
    e = np.eye(3)
    pairs = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
    return tuple(np.outer(e[i], e[j]) for i, j in pairs)


class FullComponents(MicromorphicVariant):
    """Model A: six structural-tensor projections tr(D M_i).

    With the Cartesian defaults d = (D11, D22, D33, D12, D13, D23); the shear
    entries are not doubled since M_4..M_6 are single dyads. The tensors stay
    fixed in the reference frame.
    """

    tag = "A"
    n_dbar = 6
    description = "full regularization of all six damage components"

    def __init__(self, structural_tensors: Sequence[NDArray[np.float64]] | None = None) -> None:
        tensors = tuple(
            np.asarray(M, dtype=float)
            for M in (structural_tensors or cartesian_structural_tensors())
        )
        if len(tensors) != 6 or any(M.shape != (3, 3) for M in tensors):
            raise ConfigError("model A needs six 3x3 structural tensors", source="variants")
        self.structural_tensors = tensors
        self._sym = [sym(M) for M in tensors]

    def tuple_value(self, D: SymTensor2) -> NDArray[np.float64]:
        return np.array([float(np.einsum("ij,ji", D, M)) for M in self.structural_tensors])

    def tuple_derivative(self, D: SymTensor2) -> list[SymTensor2]:
        return [M.copy() for M in self._sym]

    def tuple_hessian(self, D: SymTensor2) -> list[SymTensor4]:
        return [np.zeros((6, 6)) for _ in range(6)]


class PrincipalTraces(MicromorphicVariant):
    """Model B: (tr D, tr D^2, tr D^3)."""

    tag = "B"
    n_dbar = 3
    description = "principal traces of the damage tensor"

    def tuple_value(self, D: SymTensor2) -> NDArray[np.float64]:
        D2 = D @ D
        return np.array([trace(D), trace(D2), trace(D2 @ D)])

    def tuple_derivative(self, D: SymTensor2) -> list[SymTensor2]:
        return [IDENTITY2.copy(), 2.0 * D, 3.0 * sym(D @ D)]

    def tuple_hessian(self, D: SymTensor2) -> list[SymTensor4]:
        return [np.zeros((6, 6)), 2.0 * IDENTITY4, 3.0 * sym_product_operator(D)]


class VolumetricDeviatoric(MicromorphicVariant):
    """Model C: (tr D / 3, tr (dev D)^2)."""

    tag = "C"
    n_dbar = 2
    description = "volumetric and deviatoric split of the damage tensor"

    def tuple_value(self, D: SymTensor2) -> NDArray[np.float64]:
        dev = deviator(D)
        return np.array([trace(D) / 3.0, float(np.einsum("ij,ij", dev, dev))])

    def tuple_derivative(self, D: SymTensor2) -> list[SymTensor2]:
        return [IDENTITY2 / 3.0, 2.0 * deviator(D)]

    def tuple_hessian(self, D: SymTensor2) -> list[SymTensor4]:
        return [np.zeros((6, 6)), 2.0 * DEVIATORIC4]


class LocalModel(MicromorphicVariant):
    """No gradient-extension: the purely local damage model."""

    tag = "local"
    n_dbar = 0
    description = "local model without nonlocal degrees of freedom"

    def tuple_value(self, D: SymTensor2) -> NDArray[np.float64]:
        return np.zeros(0)

    def tuple_derivative(self, D: SymTensor2) -> list[SymTensor2]:
        return []

    def tuple_hessian(self, D: SymTensor2) -> list[SymTensor4]:
        return []
