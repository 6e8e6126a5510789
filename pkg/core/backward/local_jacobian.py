from typing import List
import numpy as np
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import deformation_gradients, scatter_element_matrices
from core.material.energy_kind import ConstraintKind
from core.material.material_field import MaterialField
from core.factor.assembly import DofPartition
from core.localstep.element_projection import ConstraintProjection, LocalProjection
from core.localstep.prox_hessian import ProxHessian, prox_hessian, penalized_hessian, tr_blend
from core.localstep.stretch_prox import LogVolumeBarrier
from core.localstep.differential import constraint_differential

def filtered_prox_hessian(constraint: ConstraintProjection, material: MaterialField, tau: float) -> ProxHessian:
    """Stretch-space prox Hessian of a proximal constraint, blended with tau."""
    sigma = constraint.result.sigma_star
    if constraint.kind == ConstraintKind.NEO_HOOKEAN_PROX:
        unfiltered = prox_hessian(sigma, material.mean_mu, material.mean_lam, material.mean_k)
    else:
        barrier = LogVolumeBarrier(material.mu, material.lam)
        unfiltered = penalized_hessian(barrier.hessian(sigma), constraint.penalty)
    return tr_blend(unfiltered.h_prox, tau)

def element_differentials(projection: LocalProjection, material: MaterialField, tau: float) -> List[np.ndarray]:
    """
    dp*/dF per registered constraint, each (n_e, 9, 9).

    Only proximal constraints see the trust-region blend; projections use their exact
    differential.
    """
    differentials = []
    for constraint in projection.constraints:
        if constraint.kind.is_proximal:
            hessian = filtered_prox_hessian(constraint, material, tau)
            differential = constraint_differential(constraint.kind, constraint.result, hessian, constraint.penalty)
        else:
            differential = constraint_differential(constraint.kind, constraint.result,
                                                   stretch_jacobian=constraint.stretch_jacobian)
        differentials.append(differential)
    return differentials

class LocalJacobian:
    """
    The operator dq -> sum_e w_e V_e G_e^T (dp*_e/dF_e) G_e dq and its transpose.

    Per-constraint differentials are folded into one weighted 9x9 block per element.
    """
    def __init__(self, mesh: TetMesh, material: MaterialField, projection: LocalProjection, tau: float):
        self.mesh = mesh
        self.tau = tau
        differentials = element_differentials(projection, material, tau)
        scale = material.pd_weight * mesh.rest_volume[:, None]
        self.blocks = sum(scale[:, column, None, None] * differential
                          for column, differential in enumerate(differentials))

    def _apply(self, dq: np.ndarray, blocks: np.ndarray) -> np.ndarray:
        dF = deformation_gradients(self.mesh, np.asarray(dq, dtype=float)).reshape(-1, 9)
        tensors = np.einsum('eij,ej->ei', blocks, dF).reshape(-1, 3, 3)
        return scatter_element_matrices(self.mesh, tensors)

    def matvec(self, dq: np.ndarray) -> np.ndarray:
        return self._apply(dq, self.blocks)

    def rmatvec(self, dq: np.ndarray) -> np.ndarray:
        return self._apply(dq, np.swapaxes(self.blocks, -1, -2))

class FreeLocalJacobian:
    """Restriction of a LocalJacobian to free vertices (fixed vertices carry zero variation)."""
    def __init__(self, jacobian: LocalJacobian, partition: DofPartition):
        self.jacobian = jacobian
        self.partition = partition

    def _embed(self, x: np.ndarray) -> np.ndarray:
        full = np.zeros((self.jacobian.mesh.num_vertices, 3))
        full[self.partition.free] = x
        return full

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.jacobian.matvec(self._embed(x))[self.partition.free]

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        return self.jacobian.rmatvec(self._embed(x))[self.partition.free]

def assemble_db_dq(mesh: TetMesh, material: MaterialField, projection: LocalProjection, tau: float) -> LocalJacobian:
    return LocalJacobian(mesh, material, projection, tau)
