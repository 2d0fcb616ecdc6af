"""Free energy contributions and their thermodynamic forces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.errors import StateOutOfRange
from micdam.tensor import (
    DEVIATORIC4,
    I_MANDEL,
    IDENTITY2,
    VOLUMETRIC4,
    SymTensor2,
    SymTensor4,
    deviator,
    isotropic_function,
    spectral_decompose,
    sym_product_operator,
    t23_dyadic,
    to_mandel,
    trace,
)
from micdam.tensor.spectral import isotropic_function_spectral
from micdam.types import MaterialParams


def _integrity(D: SymTensor2) -> float:
    s = 1.0 - trace(D) / 3.0
    if s <= 0.0:
        raise StateOutOfRange(f"tr D = {trace(D):.6g} reached 3", source="material")
    return s


def degradation_factor(D: SymTensor2, e_d: float) -> float:
    """f_d = (1 - tr D / 3)^e_d."""
    return float(_integrity(D) ** e_d)


def degradation_slope(D: SymTensor2, e_d: float) -> tuple[float, float]:
    """First and second derivative of f_d with respect to s = 1 - tr D / 3."""
    s = _integrity(D)
    return e_d * s ** (e_d - 1.0), e_d * (e_d - 1.0) * s ** (e_d - 2.0)


@dataclass(frozen=True)
class ElasticTangents:
    """Mandel second derivatives of the elastic energy."""

    dalpha_deta: SymTensor4
    dalpha_dD: SymTensor4
    dY_deta: SymTensor4
    dY_dD: SymTensor4


def elastic_energy_and_forces(
    eta: SymTensor2, D: SymTensor2, p: MaterialParams
) -> tuple[float, SymTensor2, SymTensor2]:
    """psi_e together with alpha_e = dpsi_e/deta and Y_e = -dpsi_e/dD."""
    e = deviator(eta)
    e2 = e @ e
    W = IDENTITY2 - D
    tr_eta = trace(eta)
    f_d = degradation_factor(D, p.e_d)
    df_d, _ = degradation_slope(D, p.e_d)
    mu, K, theta = p.mu, p.bulk_modulus, p.theta

    psi = (
        mu * theta * trace(e2 @ W)
        + f_d * mu * (1.0 - theta) * trace(e2)
        + 0.5 * f_d * K * tr_eta**2
    )
    alpha = (
        mu * theta * deviator(e @ W + W @ e)
        + 2.0 * (1.0 - theta) * f_d * mu * e
        + f_d * K * tr_eta * IDENTITY2
    )
    Y = mu * theta * e2 + (df_d / 3.0) * (
        (1.0 - theta) * mu * trace(e2) + 0.5 * K * tr_eta**2
    ) * IDENTITY2
    return float(psi), alpha, Y


def elastic_tangents(eta: SymTensor2, D: SymTensor2, p: MaterialParams) -> ElasticTangents:
    e = deviator(eta)
    W = IDENTITY2 - D
    tr_eta = trace(eta)
    f_d = degradation_factor(D, p.e_d)
    df_d, ddf_d = degradation_slope(D, p.e_d)
    mu, K, theta = p.mu, p.bulk_modulus, p.theta

    dalpha_deta = (
        mu * theta * DEVIATORIC4 @ sym_product_operator(W) @ DEVIATORIC4
        + 2.0 * (1.0 - theta) * f_d * mu * DEVIATORIC4
        + f_d * K * VOLUMETRIC4
    )
    volumetric_force = to_mandel(2.0 * (1.0 - theta) * mu * e + K * tr_eta * IDENTITY2)
    dY_deta = mu * theta * sym_product_operator(e) @ DEVIATORIC4 + (df_d / 3.0) * np.outer(
        I_MANDEL, volumetric_force
    )
    stored = (1.0 - theta) * mu * trace(e @ e) + 0.5 * K * tr_eta**2
    dY_dD = -(ddf_d / 9.0) * stored * VOLUMETRIC4
    return ElasticTangents(
        dalpha_deta=dalpha_deta,
        dalpha_dD=-dY_deta.T,
        dY_deta=dY_deta,
        dY_dD=dY_dD,
    )


def isotropic_hardening_energy(xi_d: float, p: MaterialParams) -> float:
    return float(p.r_d * (xi_d + np.expm1(-p.s_d * xi_d) / p.s_d) + 0.5 * p.H_d * xi_d**2)


def isotropic_hardening_force(xi_d: float, p: MaterialParams) -> float:
    """R_d = -dpsi_d/dxi_d (non-positive)."""
    return float(-(p.r_d * -np.expm1(-p.s_d * xi_d) + p.H_d * xi_d))


def isotropic_hardening_slope(xi_d: float, p: MaterialParams) -> float:
    """dR_d/dxi_d (non-positive)."""
    return float(-(p.r_d * p.s_d * np.exp(-p.s_d * xi_d) + p.H_d))


class _KinematicKernel:
    """Eigenvalue kernel K_h((1 - x)^(-1/n_h) - 1), Taylor-continued beyond a_h."""

    def __init__(self, p: MaterialParams) -> None:
        self.K = p.K_h
        self.m = 1.0 / p.n_h
        self.a = p.a_h
        a, m = self.a, self.m
        self.g_a = self.K * ((1.0 - a) ** -m - 1.0)
        self.dg_a = self.K * m * (1.0 - a) ** (-m - 1.0)
        self.ddg_a = self.K * m * (m + 1.0) * (1.0 - a) ** (-m - 2.0)
        self.h_a = self._exact_energy(np.array([a]))[0]

    def _exact_energy(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        c = 1.0 - self.m
        return self.K * ((1.0 - (1.0 - x) ** c) / c - x)

    def energy(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        t = x - self.a
        taylor = self.h_a + self.g_a * t + 0.5 * self.dg_a * t**2 + self.ddg_a * t**3 / 6.0
        inner = np.minimum(x, self.a)
        return np.where(x <= self.a, self._exact_energy(inner), taylor)

    def value(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        t = x - self.a
        inner = np.minimum(x, self.a)
        exact = self.K * ((1.0 - inner) ** -self.m - 1.0)
        return np.where(x <= self.a, exact, self.g_a + self.dg_a * t + 0.5 * self.ddg_a * t**2)

    def slope(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        inner = np.minimum(x, self.a)
        exact = self.K * self.m * (1.0 - inner) ** (-self.m - 1.0)
        return np.where(x <= self.a, exact, self.dg_a + self.ddg_a * (x - self.a))


def _check_eigenvalues(values: NDArray[np.float64]) -> None:
    if values[0] >= 1.0:
        raise StateOutOfRange(
            f"damage eigenvalue {values[0]:.12g} reached 1", source="material"
        )


def kinematic_hardening_energy(D: SymTensor2, p: MaterialParams) -> float:
    spectrum = spectral_decompose(D)
    _check_eigenvalues(spectrum.values)
    return float(np.sum(_KinematicKernel(p).energy(spectrum.values)))


def kinematic_hardening_force_with_derivative(
    D: SymTensor2, p: MaterialParams
) -> tuple[SymTensor2, SymTensor4]:
    spectrum = spectral_decompose(D)
    _check_eigenvalues(spectrum.values)
    kernel = _KinematicKernel(p)
    return isotropic_function_spectral(
        spectrum, kernel.value, kernel.slope, float(np.linalg.norm(D))
    )


def kinematic_hardening_force(D: SymTensor2, p: MaterialParams) -> SymTensor2:
    """Y_h = dpsi_h/dD, the barrier keeping damage eigenvalues below one."""
    value, _ = kinematic_hardening_force_with_derivative(D, p)
    return value


def interaction_factor(D: SymTensor2, c_d: float) -> tuple[SymTensor2, SymTensor4]:
    """B = (I - D)^c_d and dB/dD as a Mandel matrix."""
    spectrum = spectral_decompose(D)
    _check_eigenvalues(spectrum.values)
    if c_d == 1.0:
        return IDENTITY2 - D, -np.eye(6)
    B, dB_dW = isotropic_function(
        IDENTITY2 - D,
        lambda x: x**c_d,
        lambda x: c_d * x ** (c_d - 1.0),
    )
    return B, -dB_dW


def interaction_tensor(D: SymTensor2, c_d: float) -> SymTensor4:
    """A = ((I - D)^c_d (x) (I - D)^c_d)^T23, so that A : X = B X B."""
    B, _ = interaction_factor(D, c_d)
    return t23_dyadic(B, B)


def free_energy(
    eta: SymTensor2, D: SymTensor2, xi_d: float, dbar: NDArray[np.float64], p: MaterialParams
) -> float:
    """Local part of psi: elastic, hardening and penalty terms (no gradient term)."""
    psi_e, _, _ = elastic_energy_and_forces(eta, D, p)
    d = p.variant.tuple_value(D)
    penalty = 0.5 * float(np.sum(p.H * (d - dbar) ** 2)) if p.n_dbar else 0.0
    return (
        psi_e
        + isotropic_hardening_energy(xi_d, p)
        + kinematic_hardening_energy(D, p)
        + penalty
    )
