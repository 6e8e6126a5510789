from dataclasses import dataclass
from typing import Optional
import numpy as np
import scipy.sparse as sp
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import deformation_gradients
from core.material.material_field import MaterialField
from core.factor.assembly import DofPartition
from core.forward.forward_cache import ForwardCache
from core.forward.state_force import StateForce
from core.contact.contact_set import tangent_basis_jacobian
from .adjoint import ContactLinearization

@dataclass(frozen=True)
class AdjointSeed:
    """Incoming gradients dL/dq_{t+h} and dL/dv_{t+h}, both (n_v, 3)."""
    dL_dq_next: np.ndarray
    dL_dv_next: np.ndarray

    def __post_init__(self):
        if self.dL_dq_next.shape != self.dL_dv_next.shape:
            raise ValueError(f"Seed shapes differ: {self.dL_dq_next.shape} vs {self.dL_dv_next.shape}.")
        if not (np.all(np.isfinite(self.dL_dq_next)) and np.all(np.isfinite(self.dL_dv_next))):
            raise ValueError("Adjoint seed contains non-finite entries.")

    @classmethod
    def zeros(cls, num_vertices: int) -> "AdjointSeed":
        return cls(np.zeros((num_vertices, 3)), np.zeros((num_vertices, 3)))

    def position_seed(self, h: float) -> np.ndarray:
        """q_bar = dL/dq_{t+h} + dL/dv_{t+h} / h, since v_{t+h} = (q_{t+h} - q_t) / h."""
        return self.dL_dq_next + self.dL_dv_next / h

@dataclass(frozen=True)
class GradientBundle:
    dL_dq_t: np.ndarray
    dL_dv_t: np.ndarray
    dL_df_ext: np.ndarray
    dL_dw: np.ndarray
    dL_dE: np.ndarray
    tau_used: float
    tr_ratio: float
    mu: np.ndarray
    adjoint_iterations: int = 0
    fast_path: bool = True

    def norms(self) -> dict:
        return {
            "q0": float(np.linalg.norm(self.dL_dq_t)),
            "v0": float(np.linalg.norm(self.dL_dv_t)),
            "f_ext": float(np.linalg.norm(self.dL_df_ext)),
            "w": float(np.linalg.norm(self.dL_dw)),
            "E": float(np.linalg.norm(self.dL_dE)),
        }

def weight_gradients(mesh: TetMesh, cache: ForwardCache, mu: np.ndarray) -> np.ndarray:
    """dL/dw_ec = V_e (mu^T G_e^T p*_ec - mu^T G_e^T G_e q*) = V_e <G_e mu, p*_ec - F_e(q*)>."""
    grad_mu = deformation_gradients(mesh, mu)
    gaps = cache.projection.targets() - cache.projection.deformation[:, None]
    return mesh.rest_volume[:, None] * np.einsum('eij,ecij->ec', grad_mu, gaps)

def curvature_gradients(
    cache: ForwardCache,
    contacts: ContactLinearization,
    mu_free: np.ndarray,
    nu: np.ndarray,
    partition: DofPartition
) -> np.ndarray:
    """
    Part of dL/dq_t carried by contact normals that turn with the vertex, as on spheres.

    With p = q_t[v], the sphere normal n = (p - c)/|p - c| and the gap offset n.c + R follow p,
    so dn/dp = kappa P with P = I - n n^T. The normal row gains omega kappa P (q*_v - p), the
    contact force gains omega_hat lambda kappa P, and friction rows turn with their tangents.

    Returns:
        np.ndarray: (n_free, 3), zero when every touched obstacle is flat.
    """
    contact_set = cache.contact_set
    kappa = contact_set.normal_curvature()
    term = np.zeros_like(mu_free)
    if not np.any(kappa):
        return term

    multipliers = cache.contact_solution.multipliers
    c_matrix = contacts.c_matrix
    friction_start = contact_set.friction_slice().start
    pair_of = {contact: pair for pair, contact in enumerate(contact_set.frictional.tolist())}

    for contact in np.flatnonzero(kappa):
        vertex = int(contact_set.vertices[contact])
        block = int(partition.free_index[vertex])
        normal = contact_set.normals[contact]
        turn = kappa[contact] * (np.eye(3) - np.outer(normal, normal))
        travel = cache.q_star[vertex] - cache.q_start[vertex]

        term[block] -= nu[contact] * contacts.omega[contact] * turn @ travel
        term[block] += contacts.force_weight[contact] * multipliers[contact] * turn @ mu_free[block]

        pair = pair_of.get(contact)
        if pair is None:
            continue
        rows = slice(friction_start + 2 * pair, friction_start + 2 * pair + 2)
        d_tangents = tangent_basis_jacobian(normal) @ turn
        slip_weight = c_matrix[rows, 3 * block:3 * block + 3] @ contact_set.tangents[contact].T
        slip_turn = np.einsum('kij,i->kj', d_tangents, travel)
        term[block] -= slip_turn.T @ slip_weight.T @ nu[rows]
        term[block] += np.einsum('k,kij,i->j', contacts.force_weight[rows] * multipliers[rows], d_tangents,
                                 mu_free[block])

    return term

def route_gradients(
    mu_free: np.ndarray,
    cache: ForwardCache,
    seed: AdjointSeed,
    mesh: TetMesh,
    material: MaterialField,
    partition: DofPartition,
    state_force: Optional[StateForce] = None,
    damping_matrix: Optional[sp.spmatrix] = None,
    contact_term: Optional[np.ndarray] = None,
    tau: float = 0.5,
    rho: float = 1.0
) -> GradientBundle:
    """
    Turns the backbone adjoint into gradients of the step inputs.

    With q~ = q_t + h v_t + h^2 M^-1 (f_ext + f_state):
    dL/dq~ = (M / h^2) mu, dL/df_ext = mu, dL/dv_t = h dL/dq~ + J_v^T mu and
    dL/dq_t = dL/dq~ + J_q^T mu + (1/h) D mu - v_bar / h (+ contact rows).
    Material gradients follow the weights with the mesh means held fixed.

    Args:
        mu_free: (n_free, 3) backbone adjoint.
        contact_term: Optional (n_free, 3) contact part of dL/dq_t: C_f^T nu_f and the curvature terms.
    """
    h = cache.h
    mu = np.zeros((mesh.num_vertices, 3))
    mu[partition.free] = mu_free

    d_q_tilde = mesh.vertex_mass[:, None] * mu / h ** 2
    d_q = d_q_tilde - seed.dL_dv_next / h
    d_v = h * d_q_tilde

    if state_force is not None:
        d_q = d_q + state_force.jacobian_q_transpose(cache.q_start, cache.v_start, mu)
        d_v = d_v + state_force.jacobian_v_transpose(cache.q_start, cache.v_start, mu)
    if damping_matrix is not None:
        d_q = d_q + damping_matrix @ mu / h
    if contact_term is not None:
        d_q[partition.free] += contact_term

    d_w = weight_gradients(mesh, cache, mu)
    d_E = np.sum(d_w * material.weight_sensitivity(), axis=1)

    return GradientBundle(
        dL_dq_t=d_q,
        dL_dv_t=d_v,
        dL_df_ext=mu.copy(),
        dL_dw=d_w,
        dL_dE=d_E,
        tau_used=tau,
        tr_ratio=rho,
        mu=mu,
    )
