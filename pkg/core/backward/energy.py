from typing import Optional
import numpy as np
import scipy.sparse as sp
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import deformation_gradients, scatter_element_matrices
from core.material.energy_kind import EnergyKind, ConstraintKind
from core.material.material_field import MaterialField
from core.material.neo_hookean import nh_energy, nh_pk1, nh_stretch_energy
from core.localstep.corotated import corotated_project
from core.localstep.element_projection import LocalProjection, local_step
from core.localstep.stretch_prox import LogVolumeBarrier

def inertia_energy(q: np.ndarray, q_tilde: np.ndarray, mesh: TetMesh, h: float) -> float:
    """(1 / 2h^2) ||q - q~||_M^2 with the lumped mass."""
    diff = np.asarray(q, dtype=float) - q_tilde
    return float(0.5 * np.sum(mesh.vertex_mass[:, None] * diff ** 2) / h ** 2)

def damping_energy(q: np.ndarray, q_start: np.ndarray, damping_matrix: Optional[sp.spmatrix], h: float) -> float:
    """(1 / 2h) ||q - q_t||^2 over alpha M + sum beta_e V_e G_e^T G_e."""
    if damping_matrix is None:
        return 0.0
    diff = np.asarray(q, dtype=float) - q_start
    return float(0.5 * np.sum(diff * (damping_matrix @ diff)) / h)

def elastic_density(F: np.ndarray, material: MaterialField) -> np.ndarray:
    """
    Per-element hyperelastic density of the material's own model.

    Neo-Hookean uses the per-element Lame pair; the corotated model is
    mu ||F - R||^2 + (lambda / 2)(det F - 1)^2.

    Raises:
        NonPositiveJacobianError: For Neo-Hookean on an inverted element.
    """
    if material.energy_kind == EnergyKind.NEO_HOOKEAN:
        return np.atleast_1d(nh_energy(F, material.mu, material.lam))

    rotation = corotated_project(F).p_star
    stretch = np.einsum('eij,eij->e', F - rotation, F - rotation)
    return material.mu * stretch + 0.5 * material.lam * (np.linalg.det(F) - 1.0) ** 2

def primal_energy(q: np.ndarray, q_tilde: np.ndarray, mesh: TetMesh, material: MaterialField, h: float) -> float:
    """
    Phi(q) = (1 / 2h^2) ||q - q~||_M^2 + sum_e V_e psi_e(F_e(q)).

    Raises:
        NonPositiveJacobianError: If a Neo-Hookean element is inverted at q.
    """
    F = deformation_gradients(mesh, np.asarray(q, dtype=float))
    elastic = float(np.dot(mesh.rest_volume, elastic_density(F, material)))
    return inertia_energy(q, q_tilde, mesh, h) + elastic

def primal_gradient(q: np.ndarray, q_tilde: np.ndarray, mesh: TetMesh, material: MaterialField, h: float) -> np.ndarray:
    """(M / h^2)(q - q~) + sum_e V_e G_e^T P(F_e) for the Neo-Hookean model."""
    if material.energy_kind != EnergyKind.NEO_HOOKEAN:
        raise ValueError("The primal gradient is only available for the Neo-Hookean model.")
    F = deformation_gradients(mesh, np.asarray(q, dtype=float))
    stress = mesh.rest_volume[:, None, None] * nh_pk1(F, material.mu, material.lam)
    return mesh.vertex_mass[:, None] * (q - q_tilde) / h ** 2 + scatter_element_matrices(mesh, stress)

def constraint_energies(projection: LocalProjection, material: MaterialField) -> np.ndarray:
    """
    Per-element, per-constraint energies E_ec whose F-gradient is w_ec (F - p*_ec).

    Projections use (w / 2) dist^2(F, C); proximal constraints use the Moreau envelope
    (w / k) [(k / 2) ||p* - F||^2 + psi(p*)].

    Returns:
        np.ndarray: (n_e, C).
    """
    F = projection.deformation
    columns = []

    for column, constraint in enumerate(projection.constraints):
        weight = material.pd_weight[:, column]
        distance = np.einsum('eij,eij->e', F - constraint.result.p_star, F - constraint.result.p_star)

        if not constraint.kind.is_proximal:
            columns.append(0.5 * weight * distance)
            continue

        sigma = constraint.result.sigma_star
        if constraint.kind == ConstraintKind.NEO_HOOKEAN_PROX:
            density = nh_stretch_energy(sigma, material.mean_mu, material.mean_lam)
        else:
            density = LogVolumeBarrier(material.mu, material.lam).energy(sigma)
        penalty = constraint.penalty
        columns.append(weight / penalty * (0.5 * penalty * distance + density))

    return np.stack(columns, axis=1)

def pd_energy(
    q: np.ndarray,
    q_tilde: np.ndarray,
    q_start: np.ndarray,
    mesh: TetMesh,
    material: MaterialField,
    h: float,
    damping_matrix: Optional[sp.spmatrix] = None
) -> float:
    """
    Objective the PD fixed point A q = b(q) is stationary for.

    Phi_PD = inertia + (1 / 2h) ||q - q_t||^2_(alpha M + B_beta) + sum_ec V_e E_ec(F_e).
    """
    projection = local_step(mesh, material, np.asarray(q, dtype=float))
    elastic = float(np.sum(mesh.rest_volume[:, None] * constraint_energies(projection, material)))
    return inertia_energy(q, q_tilde, mesh, h) + damping_energy(q, q_start, damping_matrix, h) + elastic

def pd_gradient(
    q: np.ndarray,
    q_tilde: np.ndarray,
    q_start: np.ndarray,
    mesh: TetMesh,
    material: MaterialField,
    h: float,
    damping_matrix: Optional[sp.spmatrix] = None
) -> np.ndarray:
    """A q - b(q) written out: (M / h^2)(q - q~) + (1/h) D (q - q_t) + sum w V G^T (F - p*)."""
    q = np.asarray(q, dtype=float)
    projection = local_step(mesh, material, q)
    F = projection.deformation
    scale = material.pd_weight * mesh.rest_volume[:, None]
    tensors = np.einsum('ec,ecij->eij', scale, F[:, None] - projection.targets())
    gradient = mesh.vertex_mass[:, None] * (q - q_tilde) / h ** 2 + scatter_element_matrices(mesh, tensors)
    if damping_matrix is not None:
        gradient = gradient + damping_matrix @ (q - q_start) / h
    return gradient
