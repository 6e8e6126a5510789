import logging
from dataclasses import dataclass, field
from typing import Tuple
import numpy as np
from .exceptions import DegenerateElementError, InvalidMeshError

VOLUME_EPSILON = 1e-12

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ElementOperator:
    """Dense 9x12 block of G_e together with the 12 global DoF indices it acts on."""
    matrix: np.ndarray
    dofs: np.ndarray

@dataclass(frozen=True)
class TetMesh:
    rest_positions: np.ndarray
    elements: np.ndarray
    rest_volume: np.ndarray
    dm_inverse: np.ndarray
    density: float
    vertex_mass: np.ndarray
    shape_gradients: np.ndarray = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return self.rest_positions.shape[0]

    @property
    def num_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def lumped_mass(self) -> np.ndarray:
        """Diagonal of the lumped mass matrix over all 3 n_v DoFs (vertex-major, axis-minor)."""
        return np.repeat(self.vertex_mass, 3)

    @property
    def total_volume(self) -> float:
        return float(self.rest_volume.sum())

    def boundary_triangles(self) -> np.ndarray:
        """
        Lists faces that belong to exactly one tetrahedron.

        Returns:
            np.ndarray: (n_f, 3) vertex indices of boundary triangles.
        """
        local_faces = np.array([[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]])
        faces = self.elements[:, local_faces].reshape(-1, 3)
        keys = np.sort(faces, axis=1)
        _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
        return faces[counts[inverse.ravel()] == 1]

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_triangles())

def build_tet_mesh(rest_positions, elements, density: float) -> TetMesh:
    """
    Builds a tetrahedral mesh with rest shape operators and row-sum lumped mass.

    Args:
        rest_positions: (n_v, 3) rest coordinates in metres.
        elements: (n_e, 4) vertex indices per tetrahedron, positively oriented.
        density: Mass density in kg/m^3.

    Returns:
        TetMesh: Immutable mesh.

    Raises:
        InvalidMeshError: If there are no elements or indices are out of range.
        DegenerateElementError: If an element has rest volume below VOLUME_EPSILON.
    """
    positions = np.array(rest_positions, dtype=float).reshape(-1, 3)
    tets = np.array(elements, dtype=np.int64).reshape(-1, 4)

    if tets.shape[0] == 0:
        raise InvalidMeshError("A mesh needs at least one element.")
    if tets.min() < 0 or tets.max() >= positions.shape[0]:
        raise InvalidMeshError(f"Element indices must lie in [0, {positions.shape[0]}).")
    if density <= 0:
        raise InvalidMeshError(f"Density must be positive, got {density}.")

    x = positions[tets]
    dm = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0], x[:, 3] - x[:, 0]], axis=2)
    volumes = np.linalg.det(dm) / 6.0

    bad = np.flatnonzero(volumes < VOLUME_EPSILON)
    if bad.size:
        logger.error(f"Rejecting mesh: {bad.size} degenerate or inverted element(s), first is {bad[0]}.")
        raise DegenerateElementError(int(bad[0]), float(volumes[bad[0]]))

    dm_inverse = np.linalg.inv(dm)
    shape_gradients = np.empty((tets.shape[0], 4, 3))
    shape_gradients[:, 1:, :] = dm_inverse
    shape_gradients[:, 0, :] = -dm_inverse.sum(axis=1)

    vertex_mass = np.bincount(
        tets.ravel(), weights=np.repeat(density * volumes / 4.0, 4), minlength=positions.shape[0]
    )

    for array in (positions, tets, volumes, dm_inverse, vertex_mass, shape_gradients):
        array.setflags(write=False)

    return TetMesh(
        rest_positions=positions,
        elements=tets,
        rest_volume=volumes,
        dm_inverse=dm_inverse,
        density=float(density),
        vertex_mass=vertex_mass,
        shape_gradients=shape_gradients,
    )

def element_operator(mesh: TetMesh, e: int) -> ElementOperator:
    """Returns G_e with vec(F_e) = G_e q_e, vec taken row-major over F."""
    if not 0 <= e < mesh.num_elements:
        raise IndexError(f"Element {e} out of range for mesh with {mesh.num_elements} elements.")

    grads = mesh.shape_gradients[e]
    matrix = np.zeros((9, 12))

    for a in range(4):
        for i in range(3):
            matrix[3 * i:3 * i + 3, 3 * a + i] = grads[a]

    dofs = (3 * mesh.elements[e][:, None] + np.arange(3)[None, :]).ravel()
    return ElementOperator(matrix=matrix, dofs=dofs)

def element_dofs(mesh: TetMesh) -> Tuple[np.ndarray, np.ndarray]:
    """Row and column DoF index grids of every 12x12 element block, shape (n_e, 12, 12)."""
    dofs = (3 * mesh.elements[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, 12)
    rows = np.repeat(dofs[:, :, None], 12, axis=2)
    cols = np.repeat(dofs[:, None, :], 12, axis=1)
    return rows, cols
