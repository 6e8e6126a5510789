from typing import Any, Dict
from .tet_mesh import TetMesh, build_tet_mesh
from .hex_grid import ingest_hex_grid
from .exceptions import InvalidMeshError

def mesh_from_dict(mesh_spec: Dict[str, Any], density: float) -> TetMesh:
    """
    Builds a mesh from its JSON form.

    Accepts either {"vertices": [[x, y, z], ...], "elements": [[i, j, k, l], ...]}
    or the hex-grid shorthand {"grid": {"dims": [nx, ny, nz], "spacing": s}}.
    """
    if "grid" in mesh_spec:
        grid = mesh_spec["grid"]
        return ingest_hex_grid(grid["dims"], grid["spacing"], density)

    if "vertices" in mesh_spec and "elements" in mesh_spec:
        return build_tet_mesh(mesh_spec["vertices"], mesh_spec["elements"], density)

    raise InvalidMeshError("Mesh section needs either 'grid' or both 'vertices' and 'elements'.")
