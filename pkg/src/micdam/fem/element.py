"""Total-Lagrangian coupled element: displacement plus micromorphic fields.

Plane strain elements keep a full 3x3 deformation gradient with F33 = 1 so
the constitutive law always works with 3D tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.fem.shape import ElementType, tabulate
from micdam.material import local_update, material_tangent
from micdam.tensor import SymTensor4, tensor_log_strain, to_mandel
from micdam.tensor.mandel import BASIS
from micdam.types import GaussPointState, MaterialParams, TangentMode


@dataclass(frozen=True)
class ElementSettings:
    thickness: float = 1.0
    tangent: TangentMode = "analytic"
    local_tol: float = 1.0e-10
    local_max_iterations: int = 50


@dataclass(frozen=True)
class ElementResult:
    """Residual, tangent and trial internal variables of one element."""

    residual: NDArray[np.float64]
    tangent: NDArray[np.float64]
    D: NDArray[np.float64]
    xi_d: NDArray[np.float64]
    dissipation: float
    penalty_error: float
    volume: float


def _strain_operator(F: NDArray[np.float64], grad: NDArray[np.float64], dim: int) -> NDArray[np.float64]:
    """Mandel map of delta E = sym(F^T grad(delta u)), shape (6, n_nodes * dim)."""
    n_nodes = grad.shape[0]
    g3 = np.zeros((n_nodes, 3))
    g3[:, :dim] = grad
    B = np.einsum("Ikl,ik,al->Iai", BASIS, F[:dim], g3)
    return B.reshape(6, n_nodes * dim)


def _index_maps(n_nodes: int, dim: int, n_dbar: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    per_node = dim + n_dbar
    base = np.arange(n_nodes)[:, None] * per_node
    u_idx = (base + np.arange(dim)).ravel()
    d_idx = (base + dim + np.arange(n_dbar)).ravel()
    return u_idx, d_idx


def element_residual_tangent(
    elem_type: ElementType,
    X: NDArray[np.float64],
    nodal_u: NDArray[np.float64],
    nodal_dbar: NDArray[np.float64],
    D_old: NDArray[np.float64],
    xi_old: NDArray[np.float64],
    dt: float,
    p: MaterialParams,
    settings: ElementSettings = ElementSettings(),
) -> ElementResult:
    """Integrate the coupled weak forms over one element.

    Args:
        elem_type: "Q4" (plane strain) or "H8".
        X: Reference nodal coordinates (n_nodes, dim).
        nodal_u: Nodal displacements (n_nodes, dim).
        nodal_dbar: Nodal micromorphic values (n_nodes, n_dbar).
        D_old: Committed damage tensors per Gauss point (n_gp, 3, 3).
        xi_old: Committed accumulated damage per Gauss point (n_gp,).
        dt: Pseudo-time increment of the step.
        p: Material parameters.
        settings: Thickness and local solver controls.

    Returns:
        ElementResult with node-major residual/tangent and trial states.

    Raises:
        NonPositiveDefinite: If the deformation inverts a Gauss point.
        LocalDivergence: If a local update fails.
    """
    N_all, dN_all, weights = tabulate(elem_type)
    n_nodes, dim = X.shape
    n = p.n_dbar
    H, A = p.H, p.A
    per_node = dim + n
    size = n_nodes * per_node
    u_idx, d_idx = _index_maps(n_nodes, dim, n)
    scale = settings.thickness if dim == 2 else 1.0

    r_u = np.zeros(n_nodes * dim)
    r_d = np.zeros((n_nodes, n))
    K_uu = np.zeros((n_nodes * dim, n_nodes * dim))
    K_ud = np.zeros((n_nodes * dim, n_nodes * n))
    K_du = np.zeros((n_nodes * n, n_nodes * dim))
    K_dd = np.zeros((n_nodes * n, n_nodes * n))

    n_gp = len(weights)
    D_new = np.empty((n_gp, 3, 3))
    xi_new = np.empty(n_gp)
    dissipation = penalty_error = volume = 0.0
    eye_dim = np.eye(dim)

    for g in range(n_gp):
        N, dN = N_all[g], dN_all[g]
        J = X.T @ dN
        detJ = float(np.linalg.det(J))
        grad = dN @ np.linalg.inv(J)
        w = weights[g] * detJ * scale

        F = np.eye(3)
        F[:dim, :dim] += nodal_u.T @ grad
        C = F.T @ F
        eta, _ = tensor_log_strain(C)
        dbar = N @ nodal_dbar if n else np.zeros(0)
        grad_dbar = nodal_dbar.T @ grad if n else np.zeros((0, dim))

        result = local_update(
            eta,
            dbar,
            GaussPointState(D=D_old[g], xi_d=float(xi_old[g])),
            dt,
            p,
            tangent=settings.tangent,
            tol=settings.local_tol,
            max_iterations=settings.local_max_iterations,
        )
        S, dS_dE, P = material_tangent(result.alpha, result.C_alpha_eta, C)
        B = _strain_operator(F, grad, dim)
        s = to_mandel(S)

        r_u += w * (B.T @ s)
        geometric = grad @ S[:dim, :dim] @ grad.T
        K_uu += w * (B.T @ dS_dE @ B + np.kron(geometric, eye_dim))

        D_new[g] = result.state_new.D
        xi_new[g] = result.state_new.xi_d
        dissipation += w * result.state_new.dissipation_increment
        volume += w
        if not n:
            continue

        gap = dbar - result.d_local
        penalty_error += w * float(gap @ gap)
        r_d += w * (np.outer(N, H * gap) + grad @ (A[:, None] * grad_dbar).T)

        dS_ddbar: SymTensor4 = P @ result.dalpha_ddbar.T
        K_ud += w * np.einsum("rj,b->rbj", B.T @ dS_ddbar, N).reshape(n_nodes * dim, n_nodes * n)
        dd_du = result.dd_deta @ P @ B
        K_du += w * np.einsum("a,j,jc->ajc", N, H, -dd_du).reshape(n_nodes * n, n_nodes * dim)
        block = np.diag(H) - H[:, None] * result.dd_ddbar
        K_dd += w * (
            np.einsum("a,b,jk->ajbk", N, N, block)
            + np.einsum("ab,jk->ajbk", grad @ grad.T, np.diag(A))
        ).reshape(n_nodes * n, n_nodes * n)

    residual = np.zeros(size)
    tangent = np.zeros((size, size))
    residual[u_idx] = r_u
    tangent[np.ix_(u_idx, u_idx)] = K_uu
    if n:
        residual[d_idx] = r_d.ravel()
        tangent[np.ix_(u_idx, d_idx)] = K_ud
        tangent[np.ix_(d_idx, u_idx)] = K_du
        tangent[np.ix_(d_idx, d_idx)] = K_dd
    return ElementResult(
        residual=residual,
        tangent=tangent,
        D=D_new,
        xi_d=xi_new,
        dissipation=dissipation,
        penalty_error=penalty_error,
        volume=volume,
    )
