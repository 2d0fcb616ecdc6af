"""Spectral calculus for symmetric 3x3 tensors.

Eigenvalues come from the closed-form trigonometric solution of the
characteristic polynomial; eigenvectors from cross products of the rows of the
shifted matrix. Whenever two eigenvalues are close or the closed form fails
its reconstruction check, LAPACK ``eigh`` takes over.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.errors import DomainError, InvalidTensor, NonPositiveDefinite
from micdam.tensor.mandel import (
    BASIS,
    SQRT2,
    MandelVector,
    SymTensor2,
    SymTensor4,
    as_tensor,
    from_mandel,
    to_mandel,
)

ScalarFunction = Callable[[NDArray[np.float64]], NDArray[np.float64]]

_GAP_RATIO = 1.0e-3
_RECONSTRUCTION_TOL = 1.0e-13
REPEATED_TOL = 1.0e-9
# relative eigenvalue gap below which second derivatives fall back to differences
SECOND_ORDER_GAP = 1.0e-4
_EIGEN_PAIRS: tuple[tuple[int, int], ...] = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class Spectrum:
    """Descending eigenvalues and matching orthonormal eigenvectors (columns)."""

    values: NDArray[np.float64]
    vectors: NDArray[np.float64]

    def projection(self, i: int) -> SymTensor2:
        n = self.vectors[:, i]
        return np.outer(n, n)

    def reconstruct(self) -> SymTensor2:
        return np.asarray((self.vectors * self.values) @ self.vectors.T, dtype=float)


def _closed_form(A: SymTensor2) -> Spectrum | None:
    q = (A[0, 0] + A[1, 1] + A[2, 2]) / 3.0
    B = A - q * np.eye(3)
    p = math.sqrt(float(np.einsum("ij,ij", B, B)) / 6.0)
    if p <= 1.0e-14 * max(1.0, abs(q)):
        return None
    r = float(np.linalg.det(B / p)) / 2.0
    phi = math.acos(min(1.0, max(-1.0, r))) / 3.0
    s1 = 2.0 * p * math.cos(phi)
    s3 = 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    s2 = -s1 - s3
    if min(s1 - s2, s2 - s3) < _GAP_RATIO * p:
        return None

    def kernel_vector(shift: float) -> NDArray[np.float64]:
        M = B - shift * np.eye(3)
        candidates = (
            np.cross(M[0], M[1]),
            np.cross(M[0], M[2]),
            np.cross(M[1], M[2]),
        )
        best = max(candidates, key=lambda c: float(c @ c))
        return best / math.sqrt(float(best @ best))

    n1 = kernel_vector(s1)
    n3 = kernel_vector(s3)
    n3 = n3 - (n3 @ n1) * n1
    n3 /= math.sqrt(float(n3 @ n3))
    n2 = np.cross(n3, n1)
    vectors = np.column_stack((n1, n2, n3))
    spectrum = Spectrum(values=np.array([q + s1, q + s2, q + s3]), vectors=vectors)
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(spectrum.reconstruct() - A) > _RECONSTRUCTION_TOL * scale:
        return None
    return spectrum


def spectral_decompose(A: SymTensor2) -> Spectrum:
    """Eigenpairs of a symmetric tensor, eigenvalues in descending order."""
    A = as_tensor(A)
    if not np.allclose(A, A.T, rtol=0.0, atol=1.0e-12 * max(1.0, float(np.abs(A).max()))):
        raise InvalidTensor("tensor is not symmetric", source="tensor")
    A = 0.5 * (A + A.T)
    spectrum = _closed_form(A)
    if spectrum is not None:
        return spectrum
    values, vectors = np.linalg.eigh(A)
    return Spectrum(values=values[::-1].copy(), vectors=vectors[:, ::-1].copy())


def eigen_mandel_basis(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    """Columns are Mandel vectors of the orthonormal eigen-dyad basis."""
    G = np.empty((6, 6))
    for index, (a, b) in enumerate(_EIGEN_PAIRS):
        dyad = np.outer(vectors[:, a], vectors[:, b])
        if a == b:
            G[:, index] = to_mandel(dyad)
        else:
            G[:, index] = to_mandel(SQRT2 * 0.5 * (dyad + dyad.T))
    return G


def isotropic_function_spectral(
    spectrum: Spectrum,
    f: ScalarFunction,
    df: ScalarFunction,
    scale: float,
) -> tuple[SymTensor2, SymTensor4]:
    """Value and derivative of an isotropic tensor function from a known spectrum."""
    lam = spectrum.values
    with np.errstate(all="ignore"):
        fv = np.asarray(f(lam), dtype=float)
        dfv = np.asarray(df(lam), dtype=float)
    if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(dfv))):
        raise DomainError(f"function undefined at eigenvalues {lam.tolist()}", source="tensor")

    V = spectrum.vectors
    value = (V * fv) @ V.T

    tol = REPEATED_TOL * max(1.0, scale)
    theta = np.empty(6)
    theta[:3] = dfv
    for index, (i, j) in enumerate(_EIGEN_PAIRS[3:], start=3):
        gap = lam[i] - lam[j]
        theta[index] = (fv[i] - fv[j]) / gap if abs(gap) >= tol else dfv[i]
    G = eigen_mandel_basis(V)
    derivative = (G * theta) @ G.T
    return value, derivative


def isotropic_function(
    A: SymTensor2, f: ScalarFunction, df: ScalarFunction
) -> tuple[SymTensor2, SymTensor4]:
    """F(A) = sum f(lambda_i) n_i (x) n_i and dF/dA as a Mandel matrix."""
    spectrum = spectral_decompose(A)
    return isotropic_function_spectral(spectrum, f, df, float(np.linalg.norm(A)))


def _reciprocal(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return 1.0 / x


def tensor_log_strain(C: SymTensor2) -> tuple[SymTensor2, SymTensor4]:
    """Logarithmic strain eta = ln(C) / 2 and P = 2 d(eta)/dC."""
    spectrum = spectral_decompose(C)
    if spectrum.values[-1] <= 0.0:
        raise NonPositiveDefinite(
            f"right Cauchy-Green tensor has eigenvalue {spectrum.values[-1]:.3e}",
            source="kinematics",
        )
    log_c, P = isotropic_function_spectral(spectrum, np.log, _reciprocal, float(np.linalg.norm(C)))
    return 0.5 * log_c, P


def tensor_exp(A: SymTensor2) -> SymTensor2:
    value, _ = isotropic_function(A, np.exp, np.exp)
    return value


def _ramp(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.maximum(x, 0.0)


def _step(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return (x > 0.0).astype(float)


def positive_part(Y: SymTensor2) -> SymTensor2:
    """Y+ = sum <Y_i> n_i (x) n_i."""
    spectrum = spectral_decompose(Y)
    V = spectrum.vectors
    return np.asarray((V * np.maximum(spectrum.values, 0.0)) @ V.T, dtype=float)


def positive_part_with_derivative(Y: SymTensor2) -> tuple[SymTensor2, SymTensor4]:
    """Y+ together with its active-set derivative P+ = dY+/dY."""
    return isotropic_function(Y, _ramp, _step)


def contracted_second_derivative(
    A: SymTensor2,
    derivative: Callable[[SymTensor2], SymTensor4],
    z: MandelVector,
    step: float | None = None,
) -> SymTensor4:
    """d/dA [dF(A) : Z] for a fixed Z, by central differences of the exact first derivative."""
    a = to_mandel(A)
    h = step if step is not None else 1.0e-6 * max(1.0, float(np.linalg.norm(a)))
    J = np.empty((6, 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        J[:, k] = (derivative(from_mandel(a + e)) @ z - derivative(from_mandel(a - e)) @ z) / (2 * h)
    return J


def _second_divided_differences(
    lam: NDArray[np.float64],
    fv: NDArray[np.float64],
    dfv: NDArray[np.float64],
    d2fv: NDArray[np.float64],
) -> NDArray[np.float64]:
    """f[l_i, l_k, l_j] for pairwise distinct eigenvalues, shape (3, 3, 3)."""
    gaps = lam[:, None] - lam[None, :]
    np.fill_diagonal(gaps, 1.0)
    f1 = (fv[:, None] - fv[None, :]) / gaps
    np.fill_diagonal(f1, dfv)
    f2 = np.empty((3, 3, 3))
    for i in range(3):
        for k in range(3):
            for j in range(3):
                if i != j:
                    f2[i, k, j] = (f1[i, k] - f1[k, j]) / (lam[i] - lam[j])
                elif k != i:
                    f2[i, k, j] = (f1[k, i] - f1[i, i]) / (lam[k] - lam[i])
                else:
                    f2[i, k, j] = 0.5 * d2fv[i]
    return f2


def isotropic_second_derivative(
    A: SymTensor2,
    f: ScalarFunction,
    df: ScalarFunction,
    d2f: ScalarFunction,
    z: MandelVector,
    step: float | None = None,
) -> SymTensor4:
    """d/dA [dF(A) : Z] for F(A) = sum f(lambda_i) n_i (x) n_i.

    Closed form from second divided differences in the eigenbasis when all
    eigenvalues are separated; central differences of the first derivative
    otherwise.
    """
    spectrum = spectral_decompose(A)
    lam = spectrum.values
    scale = float(np.linalg.norm(A))
    if min(lam[0] - lam[1], lam[1] - lam[2]) < SECOND_ORDER_GAP * max(1.0, scale):
        return contracted_second_derivative(
            A, lambda X: isotropic_function(X, f, df)[1], z, step
        )
    with np.errstate(all="ignore"):
        fv = np.asarray(f(lam), dtype=float)
        dfv = np.asarray(df(lam), dtype=float)
        d2fv = np.asarray(d2f(lam), dtype=float)
    if not all(np.all(np.isfinite(v)) for v in (fv, dfv, d2fv)):
        raise DomainError(f"function undefined at eigenvalues {lam.tolist()}", source="tensor")

    f2 = _second_divided_differences(lam, fv, dfv, d2fv)
    V = spectrum.vectors
    Zt = V.T @ from_mandel(z) @ V
    Ht = np.einsum("ai,nab,bj->nij", V, BASIS, V)
    Mt = np.einsum("ikj,ik,nkj->nij", f2, Zt, Ht) + np.einsum("ikj,nik,kj->nij", f2, Ht, Zt)
    M = np.einsum("ia,nab,jb->nij", V, Mt, V)
    return np.asarray(np.einsum("Iij,nij->In", BASIS, M), dtype=float)


def _zero(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.zeros_like(x)


def _negative_reciprocal_square(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return -1.0 / (x * x)


def log_projection_second_derivative(C: SymTensor2, z: MandelVector) -> SymTensor4:
    """d/dC [P(C) : Z] with P = d ln(C)/dC."""
    return isotropic_second_derivative(C, np.log, _reciprocal, _negative_reciprocal_square, z)


def positive_part_second_derivative(Y: SymTensor2, z: MandelVector) -> SymTensor4:
    """d/dY [P+(Y) : Z], zero curvature of the ramp away from its kink."""
    return isotropic_second_derivative(Y, _ramp, _step, _zero, z)
