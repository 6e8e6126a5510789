import logging
from typing import Optional, Sequence
import numpy as np
from .tet_mesh import TetMesh, build_tet_mesh
from .exceptions import InvalidMeshError

# Corner c of a unit cell sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1).
# Six tets around the 0-7 diagonal.
KUHN_TETS = np.array([
    [0, 1, 3, 7],
    [0, 3, 2, 7],
    [0, 2, 6, 7],
    [0, 6, 4, 7],
    [0, 4, 5, 7],
    [0, 5, 1, 7],
])

logger = logging.getLogger(__name__)

def build_hex_cells(
    dims: Sequence[int],
    spacing: float,
    density: float,
    origin: Sequence[float] = (0.0, 0.0, 0.0),
    cell_mask: Optional[np.ndarray] = None
) -> TetMesh:
    """
    Splits an axis-aligned voxel grid into tetrahedra.

    Cells are reflected along each axis with odd cell index so that neighbouring
    cells share face diagonals, which keeps the split conforming.

    Args:
        dims: Cell counts (nx, ny, nz).
        spacing: Cell edge length in metres.
        density: Mass density in kg/m^3.
        origin: Position of the grid corner with the smallest coordinates.
        cell_mask: Optional boolean array of shape dims selecting the cells to keep.

    Returns:
        TetMesh: Mesh with unreferenced grid vertices removed.
    """
    nx, ny, nz = (int(d) for d in dims)
    if min(nx, ny, nz) < 1:
        raise InvalidMeshError(f"Grid dimensions must be at least 1 along every axis, got {tuple(dims)}.")
    if spacing <= 0:
        raise InvalidMeshError(f"Grid spacing must be positive, got {spacing}.")

    mask = np.ones((nx, ny, nz), dtype=bool) if cell_mask is None else np.asarray(cell_mask, dtype=bool)
    if mask.shape != (nx, ny, nz):
        raise InvalidMeshError(f"Cell mask shape {mask.shape} does not match grid dims {(nx, ny, nz)}.")

    def vertex_id(i, j, k):
        return (i * (ny + 1) + j) * (nz + 1) + k

    corner_offsets = np.array([[c & 1, (c >> 1) & 1, (c >> 2) & 1] for c in range(8)])
    tets = []

    for i, j, k in zip(*np.nonzero(mask)):
        flip = (i % 2) | ((j % 2) << 1) | ((k % 2) << 2)
        corners = []
        for c in range(8):
            dx, dy, dz = corner_offsets[c ^ flip]
            corners.append(vertex_id(i + dx, j + dy, k + dz))
        corners = np.array(corners)
        tets.append(corners[KUHN_TETS])

    if not tets:
        raise InvalidMeshError("Cell mask selects no cells.")

    tets = np.concatenate(tets, axis=0)
    grid = np.stack(np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), np.arange(nz + 1), indexing='ij'), axis=-1)
    positions = grid.reshape(-1, 3) * float(spacing) + np.asarray(origin, dtype=float)

    used, remapped = np.unique(tets, return_inverse=True)
    tets = remapped.reshape(tets.shape)
    positions = positions[used]

    # Reflections flip orientation; restore positive volume by swapping two vertices.
    x = positions[tets]
    dets = np.linalg.det(np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0], x[:, 3] - x[:, 0]], axis=2))
    negative = dets < 0
    tets[negative] = tets[negative][:, [0, 2, 1, 3]]

    logger.debug(f"Hex grid {nx}x{ny}x{nz}: {positions.shape[0]} vertices, {tets.shape[0]} tets.")
    return build_tet_mesh(positions, tets, density)

def ingest_hex_grid(dims: Sequence[int], spacing: float, density: float) -> TetMesh:
    return build_hex_cells(dims, spacing, density)
