"""Second- and fourth-order algebra on symmetric tensors."""

from __future__ import annotations

import numpy as np

from micdam.tensor.mandel import (
    BASIS,
    IDENTITY2,
    SymTensor2,
    SymTensor4,
)


def trace(A: SymTensor2) -> float:
    return float(A[0, 0] + A[1, 1] + A[2, 2])


def deviator(A: SymTensor2) -> SymTensor2:
    """dev A = A - (tr A / 3) I."""
    return A - (trace(A) / 3.0) * IDENTITY2


def sym(A: SymTensor2) -> SymTensor2:
    return 0.5 * (A + A.T)


def double_contract(A: SymTensor2, B: SymTensor2) -> float:
    """A : B."""
    return float(np.einsum("ij,ij", A, B))


def norm(A: SymTensor2) -> float:
    """Frobenius norm."""
    return float(np.sqrt(double_contract(A, A)))


def t23_dyadic(A: SymTensor2, B: SymTensor2) -> SymTensor4:
    """Mandel matrix of (A (x) B)^T23 restricted to symmetric tensors.

    The map acts as X -> sym(A X B). For A == B (the interaction tensor case)
    A X A is already symmetric and the map is exactly X -> A X B.
    """
    return np.asarray(np.einsum("Iij,ik,Jkl,lj->IJ", BASIS, A, BASIS, B), dtype=float)


def sym_product_operator(G: np.ndarray) -> SymTensor4:
    """Mandel matrix of X -> X G + G^T X for symmetric X.

    For symmetric G this is the derivative of X -> X^2 at X = G, and of
    X -> tr(X X W) type products in the elastic energy.
    """
    left = np.einsum("Iij,Jjk,ki->IJ", BASIS, BASIS, G)
    right = np.einsum("Iij,kj,Jki->IJ", BASIS, G, BASIS)
    return np.asarray(left + right, dtype=float)
