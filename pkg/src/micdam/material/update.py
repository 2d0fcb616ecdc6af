"""Backward-Euler update of the damage variables at one quadrature point.

The local unknowns are the six Mandel components of D and the multiplier
increment dgamma; the accumulated damage follows as xi_d = xi_d_old + dgamma.
Tangents come from differentiating the converged residual (implicit function
theorem) or, in ``fd`` mode, from central differences of the whole update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.errors import LocalDivergence, StateOutOfRange
from micdam.material.energies import (
    elastic_energy_and_forces,
    elastic_tangents,
    interaction_factor,
    isotropic_hardening_force,
    isotropic_hardening_slope,
    kinematic_hardening_force_with_derivative,
)
from micdam.tensor import (
    SymTensor2,
    SymTensor4,
    from_mandel,
    log_projection_second_derivative,
    positive_part_second_derivative,
    positive_part_with_derivative,
    sym_product_operator,
    t23_dyadic,
    tensor_log_strain,
    to_mandel,
)
from micdam.types import GaussPointState, LocalUpdateResult, MaterialParams, TangentMode
from micdam.variants import nonlocal_force, nonlocal_force_jacobian

LOCAL_TOL = 1.0e-10
LOCAL_MAX_ITERATIONS = 50
FD_STEP = 1.0e-7
_MIN_STEP = 1.0e-8
_EIGEN_CEILING = 1.0 - 1.0e-15


@dataclass
class _LocalSystem:
    """Residual, Jacobian and the partials needed for the consistent tangents."""

    residual: NDArray[np.float64]
    jacobian: NDArray[np.float64] | None
    Y: SymTensor2
    criterion: float
    R_d: float
    alpha: SymTensor2
    dn_dY: SymTensor4 | None = None
    dPhi_dY: NDArray[np.float64] | None = None
    dY_deta: SymTensor4 | None = None
    dY_ddbar: NDArray[np.float64] | None = None
    dalpha_deta: SymTensor4 | None = None
    dalpha_dD: SymTensor4 | None = None


def _assemble_system(
    x: NDArray[np.float64],
    eta: SymTensor2,
    dbar: NDArray[np.float64],
    old: GaussPointState,
    dt: float,
    p: MaterialParams,
    with_jacobian: bool = True,
) -> _LocalSystem:
    d_vec, dgamma = x[:6], float(x[6])
    D = from_mandel(d_vec)
    xi = old.xi_d + dgamma
    R = isotropic_hardening_force(xi, p)
    dR = isotropic_hardening_slope(xi, p)
    kappa = p.Y0 - R

    _, alpha, Y_e = elastic_energy_and_forces(eta, D, p)
    Y_h, dYh_dD = kinematic_hardening_force_with_derivative(D, p)
    Y = Y_e - Y_h - nonlocal_force(p.variant, D, dbar, p.H)

    Y_pos, P_pos = positive_part_with_derivative(Y)
    B, dB_dD = interaction_factor(D, p.c_d)
    z = to_mandel(B @ Y_pos @ B)
    q = max(float(to_mandel(Y_pos) @ z), 0.0)
    root_q = math.sqrt(q)
    phi = math.sqrt(3.0) * root_q - kappa
    n = (3.0 / kappa) * (P_pos @ z)

    residual = np.empty(7)
    residual[:6] = d_vec - to_mandel(old.D) - dgamma * n
    residual[6] = (phi - p.eta_v * dgamma / dt) / p.Y0
    system = _LocalSystem(residual=residual, jacobian=None, Y=Y, criterion=phi, R_d=R, alpha=alpha)
    if not with_jacobian:
        return system

    tangents = elastic_tangents(eta, D, p)
    dYdb_dD, dYdb_ddbar = nonlocal_force_jacobian(p.variant, D, dbar, p.H)
    dY_dD = tangents.dY_dD - dYh_dD - dYdb_dD

    H_pos = positive_part_second_derivative(Y, z)
    A = t23_dyadic(B, B)
    dn_dY = (3.0 / kappa) * (H_pos + P_pos @ A @ P_pos)
    dn_dD = (3.0 / kappa) * (P_pos @ sym_product_operator(Y_pos @ B) @ dB_dD) + dn_dY @ dY_dD
    dn_dgamma = (dR / kappa) * n

    if root_q > 1.0e-14 * p.Y0:
        dPhi_dY = (math.sqrt(3.0) / root_q) * (P_pos @ z)
        dPhi_dD = (math.sqrt(3.0) / root_q) * (dB_dD.T @ to_mandel(Y_pos @ B @ Y_pos))
    else:
        dPhi_dY = np.zeros(6)
        dPhi_dD = np.zeros(6)
    dPhi_dD = dPhi_dD + dY_dD.T @ dPhi_dY

    J = np.empty((7, 7))
    J[:6, :6] = np.eye(6) - dgamma * dn_dD
    J[:6, 6] = -n - dgamma * dn_dgamma
    J[6, :6] = dPhi_dD / p.Y0
    J[6, 6] = (dR - p.eta_v / dt) / p.Y0

    system.jacobian = J
    system.dn_dY = dn_dY
    system.dPhi_dY = dPhi_dY
    system.dY_deta = tangents.dY_deta
    system.dY_ddbar = -dYdb_ddbar.T
    system.dalpha_deta = tangents.dalpha_deta
    system.dalpha_dD = tangents.dalpha_dD
    return system


def _admissible(d_vec: NDArray[np.float64]) -> bool:
    return bool(np.linalg.eigvalsh(from_mandel(d_vec))[-1] < _EIGEN_CEILING)


def _newton(
    eta: SymTensor2,
    dbar: NDArray[np.float64],
    old: GaussPointState,
    dt: float,
    p: MaterialParams,
    tol: float,
    max_iterations: int,
) -> tuple[NDArray[np.float64], _LocalSystem, int]:
    x = np.concatenate([to_mandel(old.D), [0.0]])
    for iteration in range(1, max_iterations + 1):
        system = _assemble_system(x, eta, dbar, old, dt, p)
        norm = float(np.linalg.norm(system.residual))
        if norm < tol and iteration > 1:
            return x, system, iteration - 1
        assert system.jacobian is not None
        try:
            dx = np.linalg.solve(system.jacobian, -system.residual)
        except np.linalg.LinAlgError as exc:
            raise LocalDivergence(
                "singular local Jacobian", source="material", details={"iteration": iteration}
            ) from exc
        step = 1.0
        while True:
            candidate = x + step * dx
            candidate[6] = max(candidate[6], 0.0)
            if _admissible(candidate[:6]):
                break
            step *= 0.5
            if step < _MIN_STEP:
                raise StateOutOfRange(
                    "local iteration cannot keep damage eigenvalues below 1",
                    source="material",
                    details={"iteration": iteration},
                )
        x = candidate
        if norm < tol:
            return x, _assemble_system(x, eta, dbar, old, dt, p), iteration
    raise LocalDivergence(
        f"local Newton did not converge in {max_iterations} iterations",
        source="material",
        details={"residual": norm, "dgamma": float(x[6])},
    )


def _solve(
    eta: SymTensor2,
    dbar: NDArray[np.float64],
    old: GaussPointState,
    dt: float,
    p: MaterialParams,
    tol: float,
    max_iterations: int,
) -> tuple[NDArray[np.float64], _LocalSystem, int, bool]:
    """Converged local unknowns, the system at that point and whether damage evolved."""
    x0 = np.concatenate([to_mandel(old.D), [0.0]])
    trial = _assemble_system(x0, eta, dbar, old, dt, p, with_jacobian=False)
    if trial.criterion <= 0.0:
        return x0, trial, 0, False
    x, system, iterations = _newton(eta, dbar, old, dt, p, tol, max_iterations)
    return x, system, iterations, x[6] > 0.0


def _check_consistency(system: _LocalSystem, dgamma: float, dissipation: float,
                       dt: float, p: MaterialParams) -> None:
    limit = 1.0e-8 * p.Y0
    overstress = system.criterion - p.eta_v * dgamma / dt
    if dissipation < -1.0e-10 or overstress > limit or dgamma * overstress > limit:
        raise LocalDivergence(
            "converged local state violates the dissipation or complementarity conditions",
            source="material",
            details={"dissipation": dissipation, "overstress": overstress, "dgamma": dgamma},
        )


def local_update(
    eta_new: SymTensor2,
    dbar_new: NDArray[np.float64],
    state_old: GaussPointState,
    dt: float,
    p: MaterialParams,
    *,
    tangent: TangentMode = "analytic",
    tol: float = LOCAL_TOL,
    max_iterations: int = LOCAL_MAX_ITERATIONS,
) -> LocalUpdateResult:
    """Integrate the viscous damage evolution over one step and linearize it."""
    dbar = np.asarray(dbar_new, dtype=float).reshape(p.n_dbar)
    x, system, iterations, inelastic = _solve(eta_new, dbar, state_old, dt, p, tol, max_iterations)
    D_new = from_mandel(x[:6])
    dgamma = float(x[6]) if inelastic else 0.0
    dissipation = (
        float(np.einsum("ij,ij", system.Y, D_new - state_old.D)) + system.R_d * dgamma
    )
    if inelastic:
        _check_consistency(system, dgamma, dissipation, dt, p)

    state_new = GaussPointState(
        D=D_new if inelastic else state_old.D,
        xi_d=state_old.xi_d + dgamma,
        dissipation_increment=dissipation if inelastic else 0.0,
    )
    d_local = p.variant.tuple_value(state_new.D)
    n = p.n_dbar

    if tangent == "fd":
        C, dalpha_ddbar, dd_deta, dd_ddbar = _fd_tangents(
            eta_new, dbar, state_old, dt, p, tol, max_iterations
        )
    elif not inelastic:
        C = elastic_tangents(eta_new, state_new.D, p).dalpha_deta
        dalpha_ddbar = np.zeros((n, 6))
        dd_deta = np.zeros((n, 6))
        dd_ddbar = np.zeros((n, n))
    else:
        C, dalpha_ddbar, dd_deta, dd_ddbar = _implicit_tangents(system, state_new.D, dgamma, p)

    return LocalUpdateResult(
        state_new=state_new,
        alpha=system.alpha,
        d_local=d_local,
        C_alpha_eta=C,
        dalpha_ddbar=dalpha_ddbar,
        dd_deta=dd_deta,
        dd_ddbar=dd_ddbar,
        delta_gamma=dgamma,
        driving_force=system.Y,
        criterion=system.criterion,
        iterations=iterations,
    )


def _implicit_tangents(
    system: _LocalSystem, D: SymTensor2, dgamma: float, p: MaterialParams
) -> tuple[NDArray[np.float64], ...]:
    assert system.jacobian is not None and system.dn_dY is not None
    assert system.dPhi_dY is not None and system.dY_deta is not None
    assert system.dY_ddbar is not None and system.dalpha_deta is not None
    assert system.dalpha_dD is not None
    dY_dext = np.hstack([system.dY_deta, system.dY_ddbar])
    dr_dext = np.vstack([
        -dgamma * system.dn_dY @ dY_dext,
        (system.dPhi_dY @ dY_dext)[None, :] / p.Y0,
    ])
    dx_dext = -np.linalg.solve(system.jacobian, dr_dext)
    dD_deta, dD_ddbar = dx_dext[:6, :6], dx_dext[:6, 6:]
    G = p.variant.derivative_mandel(D)
    C = system.dalpha_deta + system.dalpha_dD @ dD_deta
    dalpha_ddbar = (system.dalpha_dD @ dD_ddbar).T
    return C, dalpha_ddbar, G @ dD_deta, G @ dD_ddbar


def _fd_tangents(
    eta: SymTensor2,
    dbar: NDArray[np.float64],
    old: GaussPointState,
    dt: float,
    p: MaterialParams,
    tol: float,
    max_iterations: int,
) -> tuple[NDArray[np.float64], ...]:
    def response(eta_m: NDArray[np.float64], dbar_v: NDArray[np.float64]) -> NDArray[np.float64]:
        x, system, _, inelastic = _solve(
            from_mandel(eta_m), dbar_v, old, dt, p, tol, max_iterations
        )
        D = from_mandel(x[:6]) if inelastic else old.D
        return np.concatenate([to_mandel(system.alpha), p.variant.tuple_value(D)])

    n = p.n_dbar
    eta_m = to_mandel(eta)
    h_eta = FD_STEP * max(1.0, float(np.linalg.norm(eta_m)))
    h_dbar = FD_STEP * max(1.0, float(np.linalg.norm(dbar))) if n else 0.0
    jac = np.empty((6 + n, 6 + n))
    for k in range(6 + n):
        e = np.zeros(6 + n)
        h = h_eta if k < 6 else h_dbar
        e[k] = h
        plus = response(eta_m + e[:6], dbar + e[6:])
        minus = response(eta_m - e[:6], dbar - e[6:])
        jac[:, k] = (plus - minus) / (2.0 * h)
    return jac[:6, :6], jac[:6, 6:].T, jac[6:, :6], jac[6:, 6:]


def stress_and_projection(alpha: SymTensor2, C: SymTensor2) -> SymTensor2:
    """Second Piola-Kirchhoff stress S = alpha : P with P = 2 d(eta)/dC."""
    _, P = tensor_log_strain(C)
    return from_mandel(P @ to_mandel(alpha))


def material_tangent(
    alpha: SymTensor2, C_alpha_eta: SymTensor4, C: SymTensor2
) -> tuple[SymTensor2, SymTensor4, SymTensor4]:
    """S, dS/dE = 2 dS/dC and the projection P, all for one right Cauchy-Green tensor."""
    _, P = tensor_log_strain(C)
    a = to_mandel(alpha)

    dS_dE = P @ C_alpha_eta @ P + 2.0 * log_projection_second_derivative(C, a)
    return from_mandel(P @ a), dS_dE, P
