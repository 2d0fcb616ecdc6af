"""Monolithic Newton solution of displacement-controlled load steps."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from micdam.errors import GlobalDivergence, MicdamError, StepFailure, is_recoverable
from micdam.fem.assembly import SparsityPattern, assemble_results, linear_solve, map_elements
from micdam.fem.boundary import BoundaryConditions
from micdam.fem.element import ElementResult, ElementSettings
from micdam.fem.mesh import DofMap, Mesh
from micdam.fem.shape import tabulate
from micdam.logging import get_logger, log_event
from micdam.types import MaterialParams, SolverSettings, StepReport

logger = get_logger("solver")

# Converged sub-increments in a row before a cut-back increment is doubled again.
GROWTH_AFTER = 2


class CoupledSystem:
    """Mesh, DOF map, sparse pattern and committed/trial history of one simulation."""

    def __init__(
        self,
        mesh: Mesh,
        params: MaterialParams,
        bcs: BoundaryConditions,
        settings: SolverSettings | None = None,
    ) -> None:
        mesh.validate()
        self.mesh = mesh
        self.params = params
        self.bcs = bcs
        self.settings = settings or SolverSettings()
        self.dofmap = DofMap(mesh.n_nodes, mesh.dim, params.n_dbar)
        self.element_dofs = self.dofmap.element_dofs(mesh.elements)
        self.pattern = SparsityPattern.from_element_dofs(self.element_dofs, self.dofmap.total)
        self.element_settings = ElementSettings(
            thickness=mesh.thickness,
            tangent=self.settings.tangent,
            local_tol=self.settings.local_tol,
            local_max_iterations=self.settings.local_max_iterations,
        )
        n_gp = len(tabulate(mesh.element_type)[2])
        self.U = np.zeros(self.dofmap.total)
        self.D = np.zeros((mesh.n_elements, n_gp, 3, 3))
        self.xi_d = np.zeros((mesh.n_elements, n_gp))
        self.internal_force = np.zeros(self.dofmap.total)
        self.control_value = 0.0
        self.time = 0.0
        self.penalty_rms = 0.0
        self.free_dofs = bcs.free_dofs(self.dofmap.total)
        self.prescribed_dofs = bcs.prescribed_dofs

    @property
    def n_dofs(self) -> int:
        return self.dofmap.total

    def displacements(self, U: NDArray[np.float64] | None = None) -> NDArray[np.float64]:
        return self.dofmap.split(self.U if U is None else U)[0]

    def nonlocal_fields(self, U: NDArray[np.float64] | None = None) -> NDArray[np.float64]:
        return self.dofmap.split(self.U if U is None else U)[1]

    def evaluate(self, U: NDArray[np.float64], dt: float) -> list[ElementResult]:
        """Element residuals/tangents at U from the committed history (trial states)."""
        u_nodal, dbar_nodal = self.dofmap.split(U)
        X_all = self.mesh.nodes
        arguments = [
            (
                self.mesh.element_type,
                X_all[nodes],
                u_nodal[nodes],
                dbar_nodal[nodes],
                self.D[e],
                self.xi_d[e],
                dt,
                self.params,
                self.element_settings,
            )
            for e, nodes in enumerate(self.mesh.elements)
        ]
        return map_elements(arguments, self.settings.threads, self.settings.executor)

    def assemble(
        self, U: NDArray[np.float64], dt: float
    ) -> tuple[NDArray[np.float64], sp.csr_matrix, list[ElementResult]]:
        results = self.evaluate(U, dt)
        residual, tangent = assemble_results(self.pattern, self.element_dofs, results)
        return residual, tangent, results

    def commit(
        self,
        U: NDArray[np.float64],
        residual: NDArray[np.float64],
        results: list[ElementResult],
        control_value: float,
        dt: float,
    ) -> float:
        """Accept a converged increment; returns its dissipation."""
        self.U = U.copy()
        self.internal_force = residual.copy()
        self.D = np.array([r.D for r in results])
        self.xi_d = np.array([r.xi_d for r in results])
        self.control_value = control_value
        self.time += dt
        volume = sum(r.volume for r in results)
        if self.params.n_dbar and volume > 0.0:
            error = sum(r.penalty_error for r in results)
            self.penalty_rms = float(np.sqrt(error / (volume * self.params.n_dbar)))
        return float(sum(r.dissipation for r in results))

    def max_damage(self) -> float:
        if not self.D.size:
            return 0.0
        return float(np.linalg.eigvalsh(self.D.reshape(-1, 3, 3)).max())


def _newton_increment(
    system: CoupledSystem, increment: float, dt: float
) -> tuple[int, float, tuple[float, ...]]:
    settings = system.settings
    free, prescribed = system.free_dofs, system.prescribed_dofs
    lift = np.zeros(system.n_dofs)
    lift[system.bcs.controlled_dofs] = increment

    # Predictor: linearize at the committed state and eliminate the prescribed increment.
    residual, tangent, _ = system.assemble(system.U, dt)
    K_free = tangent[free]
    rhs = -(residual[free] + K_free[:, prescribed] @ lift[prescribed])
    U = system.U + lift
    U[free] += linear_solve(K_free[:, free], rhs)
    reference = max(float(np.linalg.norm(rhs)), float(np.linalg.norm(residual[prescribed])))

    energy_ref = 0.0
    last_energy = np.inf
    norms: list[float] = []
    for iteration in range(1, settings.max_iterations + 1):
        residual, tangent, results = system.assemble(U, dt)
        r_free = residual[free]
        if not np.all(np.isfinite(residual)):
            raise GlobalDivergence("non-finite residual", source="solver")
        force_norm = float(np.linalg.norm(r_free))
        reference = max(reference, float(np.linalg.norm(residual[prescribed])))
        norms.append(force_norm)
        log_event(
            logger, "newton_iteration", iteration=iteration, force_norm=force_norm,
            reference=reference, energy=None if np.isinf(last_energy) else last_energy,
        )
        converged = force_norm <= settings.force_tol * reference or force_norm < 1.0e-300
        if iteration > 1 and last_energy <= settings.energy_tol * energy_ref:
            converged = True
        if converged:
            dissipation = system.commit(
                U, residual, results, system.control_value + increment, dt
            )
            return iteration, dissipation, tuple(norms)
        correction = linear_solve(tangent[free][:, free], -r_free)
        last_energy = abs(float(correction @ r_free))
        if iteration == 1:
            energy_ref = last_energy
        U[free] += correction

    raise GlobalDivergence(
        f"global Newton did not converge in {settings.max_iterations} iterations",
        source="solver",
        details={"force_norm": norms[-1], "reference": reference},
    )


def solve_load_step(system: CoupledSystem, target: float, dt: float) -> StepReport:
    """Advance the control displacement to ``target`` with automatic cut-backs.

    Each failed attempt halves the increment and its pseudo-time step; the
    step fails after ``max_cutbacks`` halvings. After ``GROWTH_AFTER``
    converged sub-increments in a row the increment is doubled again, up to
    the full step.

    Raises:
        StepFailure: If the cut-back budget is exhausted.
    """
    start = system.control_value
    total = target - start
    increment = total
    remaining = total
    cutbacks = iterations = clean = 0
    dissipation = 0.0
    norms: tuple[float, ...] = ()
    tol = 1.0e-12 * max(1.0, abs(target))
    log_event(logger, "step_started", start=start, target=target, dt=dt)

    while abs(remaining) > tol:
        if abs(increment) > abs(remaining):
            increment = remaining
        sub_dt = dt * abs(increment / total)
        try:
            its, step_dissipation, norms = _newton_increment(system, increment, sub_dt)
        except MicdamError as exc:
            if not is_recoverable(exc):
                raise
            cutbacks += 1
            clean = 0
            log_event(logger, "step_cutback", cutback=cutbacks, cause=exc.code, message=exc.message)
            if cutbacks > system.settings.max_cutbacks:
                log_event(logger, "step_failed", target=target, committed=system.control_value)
                raise StepFailure(
                    f"load step to u = {target:.6g} failed after {cutbacks - 1} cut-backs",
                    source="solver",
                    details={
                        "committed_u": system.control_value,
                        "target": target,
                        "cause": exc.code,
                        "cause_message": exc.message,
                    },
                ) from exc
            increment *= 0.5
            continue
        iterations += its
        dissipation += step_dissipation
        remaining = target - system.control_value
        clean += 1
        if clean >= GROWTH_AFTER and abs(increment) < abs(total):
            increment = total if abs(2.0 * increment) >= abs(total) else 2.0 * increment
            clean = 0

    report = StepReport(
        u=system.control_value,
        reaction=reaction_force(system),
        iterations=iterations,
        cutbacks=cutbacks,
        dissipation=dissipation,
        max_damage=system.max_damage(),
        residual_norms=norms,
    )
    log_event(
        logger, "step_converged", u=report.u, reaction=report.reaction,
        iterations=iterations, cutbacks=cutbacks, dissipation=dissipation,
        max_damage=report.max_damage,
    )
    return report


def reaction_force(system: CoupledSystem, node_set: str | None = None, axis: int | None = None) -> float:
    """Sum of internal forces on a node set along an axis (the control DOFs by default).

    Raises:
        ConfigError: If the node set is unknown.
    """
    if node_set is None:
        dofs = system.bcs.controlled_dofs
    else:
        nodes = system.mesh.node_set(node_set)
        dofs = system.dofmap.displacement_dofs(
            nodes, system.bcs.control.axis if axis is None else axis
        )
    return float(np.sum(system.internal_force[dofs]))


def assemble(
    system: CoupledSystem, dt: float, U: NDArray[np.float64] | None = None
) -> tuple[NDArray[np.float64], sp.csr_matrix]:
    """Global residual and tangent at U (the committed solution by default), before BCs."""
    residual, tangent, _ = system.assemble(system.U if U is None else U, dt)
    return residual, tangent
