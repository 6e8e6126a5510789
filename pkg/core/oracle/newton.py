import logging
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
import scipy.linalg
import scipy.sparse as sp
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import deformation_gradients
from core.material.material_field import MaterialField
from core.material.energy_kind import EnergyKind
from core.material.exceptions import NonPositiveJacobianError
from core.material.neo_hookean import nh_stress_differential
from core.factor.assembly import DofPartition
from core.localstep.element_projection import local_step
from core.backward.energy import primal_energy, primal_gradient, pd_energy, pd_gradient
from core.backward.local_jacobian import element_differentials
from .hessian_filter import HessianFilter, EnergyModel, filter_hessians
from .dense import dense_operator
from .exceptions import LineSearchFailedError

ARMIJO_FRACTION = 1e-4
MAX_SHRINKS = 40
ROUND_OFF = 1e-14
DOF_LIMIT = 2000

@dataclass(frozen=True)
class NewtonConfig:
    filter: HessianFilter = HessianFilter.CLAMP
    max_iters: int = 100
    grad_tol: float = 1e-8
    shrink: float = 0.5
    energy_model: EnergyModel = EnergyModel.NEO_HOOKEAN

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}.")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"Line-search shrink factor must lie in (0, 1), got {self.shrink}.")

@dataclass(frozen=True)
class NewtonResult:
    q: np.ndarray
    iterations: int
    gradient_norm: float
    energies: List[float] = field(default_factory=list)

def element_gradient_operators(mesh: TetMesh) -> np.ndarray:
    """G_e as (n_e, 9, 12) with vec(F_e) = G_e q_e, row-major vec and vertex-major DoFs."""
    operators = np.zeros((mesh.num_elements, 9, 12))
    for a in range(4):
        for i in range(3):
            operators[:, 3 * i:3 * i + 3, 3 * a + i] = mesh.shape_gradients[:, a, :]
    return operators

class NewtonOracle:
    """
    Dense projected-Newton minimizer of the step objective, for small contact-free scenes.

    Element Hessians are eigen-filtered per the configured filter and assembled with the
    inertia (and damping) terms; steps are safeguarded by Armijo backtracking.
    """
    def __init__(
        self,
        mesh: TetMesh,
        material: MaterialField,
        partition: DofPartition,
        h: float,
        config: NewtonConfig,
        damping_matrix: Optional[sp.spmatrix] = None
    ):
        if 3 * mesh.num_vertices > DOF_LIMIT:
            raise ValueError(f"The Newton oracle is limited to {DOF_LIMIT} DoF, got {3 * mesh.num_vertices}.")
        if config.energy_model == EnergyModel.NEO_HOOKEAN and material.energy_kind != EnergyKind.NEO_HOOKEAN:
            raise ValueError("The Neo-Hookean primal needs a Neo-Hookean material.")
        self.logger = logging.getLogger(self.__class__.__name__)
        self.mesh = mesh
        self.material = material
        self.partition = partition
        self.h = h
        self.config = config
        self.damping_matrix = damping_matrix
        self.operators = element_gradient_operators(mesh)
        self.free_dofs = (3 * partition.free[:, None] + np.arange(3)[None, :]).ravel()

    def energy(self, q: np.ndarray, q_tilde: np.ndarray, q_start: np.ndarray) -> float:
        try:
            if self.config.energy_model == EnergyModel.NEO_HOOKEAN:
                return primal_energy(q, q_tilde, self.mesh, self.material, self.h)
            return pd_energy(q, q_tilde, q_start, self.mesh, self.material, self.h, self.damping_matrix)
        except NonPositiveJacobianError:
            return float('inf')

    def gradient(self, q: np.ndarray, q_tilde: np.ndarray, q_start: np.ndarray) -> np.ndarray:
        if self.config.energy_model == EnergyModel.NEO_HOOKEAN:
            return primal_gradient(q, q_tilde, self.mesh, self.material, self.h)
        return pd_gradient(q, q_tilde, q_start, self.mesh, self.material, self.h, self.damping_matrix)

    def element_hessians(self, q: np.ndarray) -> np.ndarray:
        """Unfiltered 12x12 elastic blocks V_e G_e^T (d grad / dF) G_e."""
        if self.config.energy_model == EnergyModel.NEO_HOOKEAN:
            F = deformation_gradients(self.mesh, q)
            stiffness = self.mesh.rest_volume[:, None, None] * nh_stress_differential(F, self.material.mu, self.material.lam)
        else:
            projection = local_step(self.mesh, self.material, q)
            scale = self.material.pd_weight * self.mesh.rest_volume[:, None]
            identity = np.eye(9)
            stiffness = sum(scale[:, column, None, None] * (identity - differential)
                            for column, differential in enumerate(element_differentials(projection, self.material, 0.0)))
        return np.einsum('eki,ekl,elj->eij', self.operators, stiffness, self.operators)

    def hessian(self, q: np.ndarray) -> np.ndarray:
        n = 3 * self.mesh.num_vertices
        blocks = filter_hessians(self.element_hessians(q), self.config.filter)
        dofs = (3 * self.mesh.elements[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, 12)
        matrix = np.zeros((n, n))
        for e in range(self.mesh.num_elements):
            matrix[np.ix_(dofs[e], dofs[e])] += blocks[e]
        matrix[np.arange(n), np.arange(n)] += self.mesh.lumped_mass / self.h ** 2
        if self.config.energy_model == EnergyModel.PD_SURROGATE and self.damping_matrix is not None:
            matrix += dense_operator(self.damping_matrix) / self.h
        return matrix[np.ix_(self.free_dofs, self.free_dofs)]

    def _direction(self, hessian: np.ndarray, gradient: np.ndarray) -> np.ndarray:
        try:
            direction = -scipy.linalg.solve(hessian, gradient, assume_a='sym')
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            direction = -gradient
        if np.dot(direction, gradient) >= 0:
            direction = -gradient
        return direction

    def solve(self, q_init: np.ndarray, q_tilde: np.ndarray, q_start: Optional[np.ndarray] = None) -> NewtonResult:
        """
        Minimizes the configured objective from q_init with Dirichlet vertices pinned.

        Raises:
            LineSearchFailedError: If no decreasing step is found.
        """
        q = np.array(q_init, dtype=float)
        q[self.partition.fixed] = self.partition.prescribed
        q_start = q if q_start is None else np.asarray(q_start, dtype=float)
        energies = [self.energy(q, q_tilde, q_start)]
        gradient_norm = np.inf

        for iteration in range(self.config.max_iters + 1):
            gradient = self.gradient(q, q_tilde, q_start).ravel()[self.free_dofs]
            gradient_norm = float(np.linalg.norm(gradient))
            if gradient_norm <= self.config.grad_tol:
                self.logger.debug(f"Newton converged in {iteration} iterations (|g| = {gradient_norm:.3e})")
                return NewtonResult(q=q, iterations=iteration, gradient_norm=gradient_norm, energies=energies)
            if iteration == self.config.max_iters:
                break

            direction = self._direction(self.hessian(q), gradient)
            slope = float(np.dot(gradient, direction))
            start = energies[-1]
            step = 1.0
            accepted = None

            for _ in range(MAX_SHRINKS):
                candidate = q.copy()
                candidate.reshape(-1)[self.free_dofs] += step * direction
                value = self.energy(candidate, q_tilde, q_start)
                if value <= start + ARMIJO_FRACTION * step * slope:
                    accepted = (candidate, value)
                    break
                if value <= start + ROUND_OFF * (1.0 + abs(start)):
                    candidate_gradient = self.gradient(candidate, q_tilde, q_start).ravel()[self.free_dofs]
                    if np.linalg.norm(candidate_gradient) < gradient_norm:
                        accepted = (candidate, value)
                        break
                step *= self.config.shrink

            if accepted is None:
                raise LineSearchFailedError(iteration, start, gradient_norm)
            q, value = accepted
            energies.append(value)

        self.logger.warning(f"Newton stopped after {self.config.max_iters} iterations (|g| = {gradient_norm:.3e})")
        return NewtonResult(q=q, iterations=self.config.max_iters, gradient_norm=gradient_norm, energies=energies)

def newton_solve(
    mesh: TetMesh,
    material: MaterialField,
    partition: DofPartition,
    q_init: np.ndarray,
    q_tilde: np.ndarray,
    h: float,
    config: Optional[NewtonConfig] = None,
    q_start: Optional[np.ndarray] = None,
    damping_matrix: Optional[sp.spmatrix] = None
) -> NewtonResult:
    oracle = NewtonOracle(mesh, material, partition, h, config or NewtonConfig(), damping_matrix)
    return oracle.solve(q_init, q_tilde, q_start)
