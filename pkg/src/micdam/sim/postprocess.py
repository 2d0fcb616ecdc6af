"""Element-level post-processing of committed damage states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from micdam.errors import ConfigError
from micdam.fem.mesh import Mesh
from micdam.fem.shape import tabulate
from micdam.fem.solver import CoupledSystem

COMPONENTS = ("xx", "yy", "zz", "xy", "xz", "yz")
_INDEX = {"xx": (0, 0), "yy": (1, 1), "zz": (2, 2), "xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


@dataclass(frozen=True)
class ElementFields:
    """Gauss-point averaged element quantities of one committed state."""

    D: NDArray[np.float64]
    dbar: NDArray[np.float64]
    fd: NDArray[np.float64]
    xi_d: NDArray[np.float64]


@dataclass(frozen=True)
class EigenFields:
    """Two largest damage eigenvalues per element and their unit eigenvectors.

    ``dominance`` is max_i(D_ii) - D1; it is <= 0 up to round-off, any
    positive value is reported unclamped.
    """

    D1: NDArray[np.float64]
    D2: NDArray[np.float64]
    n1: NDArray[np.float64]
    n2: NDArray[np.float64]
    dominance: NDArray[np.float64]


def element_fields(system: CoupledSystem) -> ElementFields:
    N, _, _ = tabulate(system.mesh.element_type)
    D = system.D.mean(axis=1)
    dbar_nodal = system.nonlocal_fields()
    dbar = np.einsum("ga,eaj->ej", N, dbar_nodal[system.mesh.elements]) / N.shape[0]
    integrity = np.clip(1.0 - np.trace(system.D, axis1=2, axis2=3) / 3.0, 0.0, None)
    fd = (integrity ** system.params.e_d).mean(axis=1)
    return ElementFields(D=D, dbar=dbar, fd=fd, xi_d=system.xi_d.mean(axis=1))


def component(D: NDArray[np.float64], name: str) -> NDArray[np.float64]:
    """One tensor component (``"xx"`` ... ``"yz"``) of a stack of 3x3 tensors."""
    try:
        i, j = _INDEX[name]
    except KeyError:
        raise ConfigError(
            f"unknown damage component {name!r}; use one of {', '.join(COMPONENTS)}",
            source="postprocess",
        ) from None
    return D[..., i, j]


def _canonical_sign(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    """Flip eigenvectors so their largest-magnitude entry is positive."""
    pivot = np.take_along_axis(vectors, np.abs(vectors).argmax(axis=-1)[..., None], axis=-1)
    return vectors * np.where(pivot < 0.0, -1.0, 1.0)


def eigen_postprocess(D: NDArray[np.float64] | CoupledSystem) -> EigenFields:
    """Eigen-analysis of element-averaged damage tensors.

    Args:
        D: Stack of 3x3 damage tensors, or a system whose committed state is averaged per element.

    Returns:
        EigenFields with D1 >= D2 the two largest eigenvalues.
    """
    if isinstance(D, CoupledSystem):
        D = D.D.mean(axis=1)
    D = np.asarray(D, dtype=float).reshape(-1, 3, 3)
    values, vectors = np.linalg.eigh(D)
    n1 = _canonical_sign(vectors[:, :, 2])
    n2 = _canonical_sign(vectors[:, :, 1])
    diagonal = np.diagonal(D, axis1=1, axis2=2).max(axis=1)
    return EigenFields(
        D1=values[:, 2],
        D2=values[:, 1],
        n1=n1,
        n2=n2,
        dominance=diagonal - values[:, 2],
    )


def damage_band_width(
    mesh: Mesh,
    values: NDArray[np.float64],
    threshold: float,
    axis: int = 1,
    station: float | None = None,
) -> float:
    """Extent along ``axis`` of the elements where ``values`` exceeds ``threshold``.

    With ``station`` only elements whose footprint along the other in-plane
    axis covers that coordinate count (a cut across the damage band).
    """
    selected = np.flatnonzero(np.asarray(values) > threshold)
    if selected.size == 0:
        return 0.0
    coords = mesh.nodes[mesh.elements[selected]]
    if station is not None:
        across = 1 - axis if axis in (0, 1) else 0
        lo = coords[:, :, across].min(axis=1)
        hi = coords[:, :, across].max(axis=1)
        coords = coords[(lo <= station) & (station <= hi)]
        if coords.size == 0:
            return 0.0
    along = coords[:, :, axis]
    return float(along.max() - along.min())


def field_difference(D_a: NDArray[np.float64], D_b: NDArray[np.float64]) -> float:
    """Largest absolute component difference between two element-averaged damage fields.

    Raises:
        ConfigError: If the fields do not live on the same mesh.
    """
    if D_a.shape != D_b.shape:
        raise ConfigError(
            f"damage fields differ in shape: {D_a.shape} vs {D_b.shape}", source="postprocess"
        )
    if D_a.size == 0:
        return 0.0
    return float(np.abs(D_a - D_b).max())