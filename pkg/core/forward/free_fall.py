from typing import Optional
import numpy as np
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import scatter_element_matrices
from core.material.material_field import MaterialField
from core.localstep.element_projection import LocalProjection
from .sim_state import SimState

def free_fall_target(state: SimState, f_ext: np.ndarray, f_state: Optional[np.ndarray], mesh: TetMesh, h: float) -> np.ndarray:
    """q~ = q + h v + h^2 M^-1 (f_ext + f_state), per vertex."""
    if h <= 0:
        raise ValueError(f"Time step must be positive, got {h}.")
    force = np.asarray(f_ext, dtype=float)
    if f_state is not None:
        force = force + f_state
    return state.q + h * state.v + h ** 2 * force / mesh.vertex_mass[:, None]

def projection_load(mesh: TetMesh, material: MaterialField, projection: LocalProjection) -> np.ndarray:
    """sum_{e,c} w_ec V_e G_e^T p*_ec as (n_v, 3)."""
    scale = material.pd_weight * mesh.rest_volume[:, None]
    tensors = np.einsum('ec,ecij->eij', scale, projection.targets())
    return scatter_element_matrices(mesh, tensors)

def damping_load(damping_matrix, q_start: np.ndarray, h: float) -> np.ndarray:
    """(1/h)(alpha M + sum beta_e V_e G_e^T G_e) q_t, the state term paired with damping in A."""
    return (damping_matrix @ q_start) / h

def pd_rhs(
    mesh: TetMesh,
    material: MaterialField,
    q_tilde: np.ndarray,
    projection: LocalProjection,
    h: float,
    damping: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Global-step right-hand side b = (M / h^2) q~ + sum w V G^T p* (+ damping state term).

    Elastic forces are not added; they enter only through the projections.
    """
    b = mesh.vertex_mass[:, None] * q_tilde / h ** 2 + projection_load(mesh, material, projection)
    if damping is not None:
        b = b + damping
    return b
