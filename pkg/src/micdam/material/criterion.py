"""Damage onset criterion and the direction of damage evolution."""

from __future__ import annotations

import math

import numpy as np

from micdam.material.energies import interaction_factor
from micdam.tensor import SymTensor2, from_mandel, positive_part, positive_part_with_derivative, to_mandel
from micdam.types import MaterialParams


def _threshold(R_d: float, p: MaterialParams) -> float:
    return p.Y0 - R_d


def damage_criterion(Y: SymTensor2, R_d: float, D: SymTensor2, p: MaterialParams) -> float:
    """Phi_d = sqrt(3) sqrt(Y+ : A : Y+) - (Y0 - R_d)."""
    Y_pos = positive_part(Y)
    B, _ = interaction_factor(D, p.c_d)
    q = float(np.einsum("ij,ij", Y_pos, B @ Y_pos @ B))
    return math.sqrt(3.0) * math.sqrt(max(q, 0.0)) - _threshold(R_d, p)


def flow_direction(Y: SymTensor2, R_d: float, D: SymTensor2, p: MaterialParams) -> SymTensor2:
    """N = dg_d1/dY = 3 / (Y0 - R_d) P+ : (A : Y+)."""
    Y_pos, P_pos = positive_part_with_derivative(Y)
    B, _ = interaction_factor(D, p.c_d)
    z = to_mandel(B @ Y_pos @ B)
    return from_mandel((3.0 / _threshold(R_d, p)) * (P_pos @ z))


def inelastic_potential(Y: SymTensor2, R_d: float, D: SymTensor2, p: MaterialParams) -> float:
    """g_d1 = 3 / (2 (Y0 - R_d)) Y+ : A : Y+."""
    Y_pos = positive_part(Y)
    B, _ = interaction_factor(D, p.c_d)
    q = float(np.einsum("ij,ij", Y_pos, B @ Y_pos @ B))
    return 1.5 * q / _threshold(R_d, p)
