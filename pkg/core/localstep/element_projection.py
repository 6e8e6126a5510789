import logging
from dataclasses import dataclass
from typing import Optional, Tuple
import numpy as np
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import deformation_gradients
from core.material.energy_kind import ConstraintKind
from core.material.material_field import MaterialField
from .prox_result import ProxResult
from .corotated import corotated_project
from .stretch_prox import nh_prox, log_barrier_prox, volume_project

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ConstraintProjection:
    kind: ConstraintKind
    result: ProxResult
    penalty: float = 0.0
    stretch_jacobian: Optional[np.ndarray] = None

@dataclass(frozen=True)
class LocalProjection:
    """Local-step output for every element and registered constraint."""
    deformation: np.ndarray
    constraints: Tuple[ConstraintProjection, ...]

    def targets(self) -> np.ndarray:
        """(n_e, C, 3, 3) projection targets in constraint order."""
        return np.stack([constraint.result.p_star for constraint in self.constraints], axis=1)

    def newton_iterations(self) -> int:
        return int(sum(constraint.result.newton_iters.sum() for constraint in self.constraints))

def project_constraint(kind: ConstraintKind, F: np.ndarray, material: MaterialField) -> ConstraintProjection:
    if kind == ConstraintKind.ROTATION:
        return ConstraintProjection(kind, corotated_project(F).freeze())

    if kind == ConstraintKind.VOLUME:
        result, jacobian = volume_project(F)
        jacobian.setflags(write=False)
        return ConstraintProjection(kind, result.freeze(), stretch_jacobian=jacobian)

    if kind == ConstraintKind.LOG_BARRIER:
        result = log_barrier_prox(F, material.mu, material.lam, material.mean_k)
        return ConstraintProjection(kind, result.freeze(), penalty=material.mean_k)

    result = nh_prox(F, material.mean_mu, material.mean_lam, material.mean_k)
    return ConstraintProjection(kind, result.freeze(), penalty=material.mean_k)

def local_step(mesh: TetMesh, material: MaterialField, q: np.ndarray) -> LocalProjection:
    """
    Projects every element's deformation gradient for each constraint it registers.

    The Neo-Hookean prox uses the mesh-mean parameters; heterogeneity enters through
    the projective weights only.

    Args:
        mesh: The tetrahedral mesh.
        material: Material field with constraint kinds and means.
        q: (n_v, 3) positions.
    """
    F = deformation_gradients(mesh, np.asarray(q, dtype=float))
    F.setflags(write=False)
    constraints = tuple(project_constraint(kind, F, material) for kind in material.constraint_kinds)
    return LocalProjection(deformation=F, constraints=constraints)
