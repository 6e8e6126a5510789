from dataclasses import dataclass
from typing import Iterable, Optional, Tuple
import numpy as np
import scipy.sparse as sp
from core.mesh.tet_mesh import TetMesh
from core.mesh.kinematics import element_laplacians
from core.material.material_field import MaterialField

@dataclass(frozen=True)
class DofPartition:
    """
    Free/fixed vertex split for Dirichlet elimination.

    Constraints pin whole vertices, so the scalar block A_ff stays identical per axis.
    """
    free: np.ndarray
    fixed: np.ndarray
    free_index: np.ndarray
    prescribed: np.ndarray

    @property
    def num_free(self) -> int:
        return self.free.shape[0]

    def key(self) -> bytes:
        return np.ascontiguousarray(self.fixed).tobytes()

def build_partition(num_vertices: int, dirichlet: Optional[Iterable[Tuple[int, Iterable[float]]]] = None) -> DofPartition:
    """
    Args:
        num_vertices: Vertex count of the mesh.
        dirichlet: Pairs (vertex, prescribed position).
    """
    entries = sorted((int(v), tuple(float(x) for x in position)) for v, position in (dirichlet or []))
    fixed = np.array([v for v, _ in entries], dtype=np.int64)
    if fixed.size != np.unique(fixed).size:
        raise ValueError("A vertex appears more than once in the Dirichlet list.")
    if fixed.size and (fixed.min() < 0 or fixed.max() >= num_vertices):
        raise ValueError(f"Dirichlet vertex out of range [0, {num_vertices}).")

    prescribed = np.array([p for _, p in entries], dtype=float).reshape(-1, 3)
    mask = np.ones(num_vertices, dtype=bool)
    mask[fixed] = False
    free = np.flatnonzero(mask)
    free_index = np.full(num_vertices, -1, dtype=np.int64)
    free_index[free] = np.arange(free.size)

    for array in (fixed, prescribed, free, free_index):
        array.setflags(write=False)
    return DofPartition(free=free, fixed=fixed, free_index=free_index, prescribed=prescribed)

def stiffness_coefficients(material: MaterialField, h: float) -> np.ndarray:
    """Per-element scalar sum_c w_ec + beta_e / h multiplying V_e G_e^T G_e in A."""
    return material.pd_weight.sum(axis=1) + material.beta / h

def _scatter_scalar_blocks(mesh: TetMesh, coefficients: np.ndarray, diagonal: np.ndarray) -> sp.csr_matrix:
    blocks = (coefficients * mesh.rest_volume)[:, None, None] * element_laplacians(mesh)
    rows = np.repeat(mesh.elements[:, :, None], 4, axis=2).ravel()
    cols = np.repeat(mesh.elements[:, None, :], 4, axis=1).ravel()
    n = mesh.num_vertices

    data = np.concatenate([blocks.ravel(), diagonal])
    rows = np.concatenate([rows, np.arange(n)])
    cols = np.concatenate([cols, np.arange(n)])

    matrix = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    matrix = ((matrix + matrix.T) * 0.5).tocsr()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix

def assemble_global(mesh: TetMesh, material: MaterialField, h: float) -> sp.csr_matrix:
    """
    Scalar n_v x n_v block of A = (1 + alpha h) M / h^2 + sum_e (w_e + beta_e / h) V_e G_e^T G_e.

    The full 3 n_v operator is this block replicated per axis.
    """
    if h <= 0:
        raise ValueError(f"Time step must be positive, got {h}.")

    inertia = (1.0 + material.alpha * h) * mesh.vertex_mass / h ** 2
    return _scatter_scalar_blocks(mesh, stiffness_coefficients(material, h), inertia)

def assemble_damping(mesh: TetMesh, material: MaterialField) -> sp.csr_matrix:
    """Scalar block of alpha M + sum_e beta_e V_e G_e^T G_e."""
    return _scatter_scalar_blocks(mesh, material.beta, material.alpha * mesh.vertex_mass)

def restrict(matrix: sp.csr_matrix, partition: DofPartition) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """Returns (A_ff, A_fd) for the free/fixed vertex split."""
    rows = matrix[partition.free]
    a_ff = rows[:, partition.free].tocsr()
    a_fd = rows[:, partition.fixed].tocsr()
    a_ff.sort_indices()
    return a_ff, a_fd
