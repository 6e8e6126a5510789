import numpy as np
from .tet_mesh import TetMesh

def deformation_gradients(mesh: TetMesh, q: np.ndarray) -> np.ndarray:
    """F_e = D_s(q) D_m^{-1} for every element; q has shape (n_v, 3). Returns (n_e, 3, 3)."""
    return np.einsum('eai,eaj->eij', q[mesh.elements], mesh.shape_gradients)

def scatter_element_matrices(mesh: TetMesh, tensors: np.ndarray) -> np.ndarray:
    """
    Applies G_e^T to per-element 3x3 tensors and accumulates into vertices.

    Args:
        mesh: The tetrahedral mesh.
        tensors: (n_e, 3, 3) already scaled by the per-element coefficient.

    Returns:
        np.ndarray: (n_v, 3) nodal vectors, accumulated in element order.
    """
    nodal = np.einsum('eij,eaj->eai', tensors, mesh.shape_gradients)
    flat_index = mesh.elements.ravel()
    out = np.empty((mesh.num_vertices, 3))

    for axis in range(3):
        out[:, axis] = np.bincount(flat_index, weights=nodal[:, :, axis].ravel(), minlength=mesh.num_vertices)

    return out

def element_laplacians(mesh: TetMesh) -> np.ndarray:
    """Scalar 4x4 blocks B_e B_e^T such that G_e^T G_e = (B_e B_e^T) kron I_3."""
    return np.einsum('eaj,ebj->eab', mesh.shape_gradients, mesh.shape_gradients)
