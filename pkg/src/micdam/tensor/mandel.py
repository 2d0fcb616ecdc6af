"""Mandel storage for symmetric second- and fourth-order tensors.

A symmetric 3x3 tensor ``A`` is stored as the 6-vector

    [A11, A22, A33, sqrt(2) A12, sqrt(2) A13, sqrt(2) A23]

so that ``A : B == a @ b`` and a minor-symmetric fourth-order tensor acting on
symmetric tensors is a 6x6 matrix with ``(C : X) -> C @ x``. Voigt vectors
(engineering shear strains, plain shear stresses) only appear at file
boundaries through :func:`to_voigt`.
"""

from __future__ import annotations

from collections.abc import Callable
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from micdam.errors import InvalidTensor

SymTensor2 = NDArray[np.float64]
"""Symmetric second-order tensor as a (3, 3) array."""

MandelVector = NDArray[np.float64]
"""Symmetric second-order tensor as a Mandel (6,) vector."""

SymTensor4 = NDArray[np.float64]
"""Minor-symmetric fourth-order tensor as a Mandel (6, 6) matrix."""

SQRT2 = float(np.sqrt(2.0))

# Component order: xx, yy, zz, xy, xz, yz
PAIRS: tuple[tuple[int, int], ...] = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
WEIGHTS = np.array([1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2])
COMPONENT_NAMES: tuple[str, ...] = ("xx", "yy", "zz", "xy", "xz", "yz")

_ROWS = np.array([p[0] for p in PAIRS])
_COLS = np.array([p[1] for p in PAIRS])


def _basis() -> NDArray[np.float64]:
    basis = np.zeros((6, 3, 3))
    for index, (i, j) in enumerate(PAIRS):
        if i == j:
            basis[index, i, i] = 1.0
        else:
            basis[index, i, j] = basis[index, j, i] = 1.0 / SQRT2
    return basis


BASIS = _basis()
"""Orthonormal basis tensors E_I with to_mandel(E_I) = e_I."""

IDENTITY2 = np.eye(3)
I_MANDEL = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
IDENTITY4 = np.eye(6)
VOLUMETRIC4 = np.outer(I_MANDEL, I_MANDEL)
DEVIATORIC4 = IDENTITY4 - VOLUMETRIC4 / 3.0


def as_tensor(A: NDArray[np.float64] | list[list[float]], name: str = "tensor") -> SymTensor2:
    """Validate shape and finiteness; return a float (3, 3) array."""
    array = np.asarray(A, dtype=float)
    if array.shape != (3, 3):
        raise InvalidTensor(f"{name} must have shape (3, 3), got {array.shape}", source="tensor")
    if not np.all(np.isfinite(array)):
        raise InvalidTensor(f"{name} has non-finite entries", source="tensor")
    return array


def to_mandel(A: SymTensor2) -> MandelVector:
    """Symmetric part of a 3x3 tensor in Mandel form."""
    sym = 0.5 * (A + A.T)
    return np.asarray(sym[_ROWS, _COLS] * WEIGHTS, dtype=float)


def from_mandel(v: MandelVector) -> SymTensor2:
    """Full symmetric 3x3 tensor from a Mandel vector."""
    A = np.empty((3, 3))
    values = v / WEIGHTS
    A[_ROWS, _COLS] = values
    A[_COLS, _ROWS] = values
    return A


def to_voigt(A: SymTensor2, kind: Literal["strain", "stress"] = "stress") -> NDArray[np.float64]:
    """Voigt vector (xx, yy, zz, xy, xz, yz); strains carry engineering shears."""
    factor = 2.0 if kind == "strain" else 1.0
    v = A[_ROWS, _COLS].astype(float)
    v[3:] *= factor
    return v


def from_voigt(v: NDArray[np.float64], kind: Literal["strain", "stress"] = "stress") -> SymTensor2:
    """Inverse of :func:`to_voigt`."""
    factor = 2.0 if kind == "strain" else 1.0
    values = np.array(v, dtype=float)
    values[3:] /= factor
    A = np.empty((3, 3))
    A[_ROWS, _COLS] = values
    A[_COLS, _ROWS] = values
    return A


def fourth_from_action(action: Callable[[SymTensor2], SymTensor2]) -> SymTensor4:
    """Mandel matrix of a linear map on symmetric tensors, built column by column."""
    M = np.empty((6, 6))
    for J in range(6):
        M[:, J] = to_mandel(action(BASIS[J]))
    return M


def rotation_to_mandel(Q: NDArray[np.float64]) -> NDArray[np.float64]:
    """Orthogonal 6x6 matrix R with to_mandel(Q A Q^T) = R @ to_mandel(A)."""
    return fourth_from_action(lambda X: Q @ X @ Q.T)
