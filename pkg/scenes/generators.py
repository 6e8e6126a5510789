import copy, logging
from typing import Any, Callable, Dict, List, Optional
import numpy as np
from core.mesh.hex_grid import build_hex_cells
from utils.constants import GRAVITY
from config.exceptions import UnknownGeneratorError

logger = logging.getLogger(__name__)

TWO_TET_VERTICES = np.array([
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
])
TWO_TET_ELEMENTS = [[0, 1, 2, 3], [1, 2, 3, 4]]

def _grid_mesh(dims, spacing: float, origin=(0.0, 0.0, 0.0), cell_mask: Optional[np.ndarray] = None) -> Dict[str, Any]:
    # Density is applied when the scene is built; the placeholder only fixes the topology here.
    mesh = build_hex_cells(dims, spacing, 1.0, origin=origin, cell_mask=cell_mask)
    return {"vertices": mesh.rest_positions.tolist(), "elements": mesh.elements.tolist()}

def _centroids(mesh_spec: Dict[str, Any]) -> np.ndarray:
    vertices = np.asarray(mesh_spec["vertices"], dtype=float)
    return vertices[np.asarray(mesh_spec["elements"])].mean(axis=1)

def _material(params: Dict[str, Any], young: float, energy: str = "neohookean") -> Dict[str, Any]:
    return {
        "energy": params.get("energy", energy),
        "young": float(params.get("young", young)),
        "poisson": float(params.get("poisson", 0.3)),
        "density": float(params.get("density", 1000.0)),
        "log_volume_barrier": bool(params.get("log_volume_barrier", False)),
        "alpha": float(params.get("alpha", 0.0)),
        "beta0": float(params.get("beta0", 0.0)),
    }

def _pin(vertices: np.ndarray, mask: np.ndarray) -> List[Dict[str, Any]]:
    return [{"vertex": int(v), "position": vertices[v].tolist()} for v in np.flatnonzero(mask)]

def _floor(friction: float, offset: float = 0.0) -> Dict[str, Any]:
    return {"type": "halfspace", "normal": [0.0, 0.0, 1.0], "offset": offset, "friction": friction}

def two_tet(params: Dict[str, Any]) -> Dict[str, Any]:
    """Two tetrahedra sharing a face: the smallest scene for gradient checks."""
    size = float(params.get("size", 0.1))
    floor = bool(params.get("floor", False))
    vertices = TWO_TET_VERTICES * size
    pinned = params.get("pinned", [] if floor else [0])

    scene = {
        "name": "two-tet",
        "mesh": {"vertices": vertices.tolist(), "elements": TWO_TET_ELEMENTS},
        "material": _material(params, young=1e4),
        "dirichlet": [{"vertex": int(v), "position": vertices[v].tolist()} for v in pinned],
        "obstacles": [_floor(float(params.get("friction", 0.0)))] if floor else [],
        "gravity": list(params.get("gravity", GRAVITY)),
        "initial_state": {"velocity": list(params.get("velocity", [0.0, 0.0, 0.0]))},
        "frames": int(params.get("frames", 3)),
    }
    return scene

def _bar(params: Dict[str, Any]) -> Dict[str, Any]:
    dims = [int(d) for d in params.get("dims", [6, 2, 2])]
    spacing = float(params.get("spacing", 0.05))
    contrast = float(params.get("contrast", 10.0))
    mesh = _grid_mesh(dims, spacing)
    vertices = np.asarray(mesh["vertices"])
    length = dims[0] * spacing

    centroid_x = _centroids(mesh)[:, 0]
    middle = np.flatnonzero((centroid_x > length / 3.0) & (centroid_x < 2.0 * length / 3.0))
    material = _material(params, young=1e5)
    material["regions"] = [{"name": "stiff", "elements": middle.tolist(), "young": material["young"] * contrast}]

    return {
        "mesh": mesh,
        "material": material,
        "dirichlet": _pin(vertices, np.isclose(vertices[:, 0], 0.0)),
        "obstacles": [],
        "frames": int(params.get("frames", 10)),
    }

def cantilever3(params: Dict[str, Any]) -> Dict[str, Any]:
    """Bar clamped at x = 0 with a stiff middle third, sagging under gravity."""
    scene = _bar(params)
    scene["name"] = "cantilever3"
    scene["gravity"] = list(params.get("gravity", GRAVITY))
    return scene

def twist_bar(params: Dict[str, Any]) -> Dict[str, Any]:
    """Three-segment bar released from a twist that grows linearly from the clamped end."""
    scene = _bar(params)
    vertices = np.asarray(scene["mesh"]["vertices"])
    dims = [int(d) for d in params.get("dims", [6, 2, 2])]
    spacing = float(params.get("spacing", 0.05))
    length = dims[0] * spacing
    axis_center = np.array([dims[1], dims[2]], dtype=float) * spacing / 2.0
    angles = float(params.get("twist", np.pi / 4.0)) * vertices[:, 0] / length

    offsets = vertices[:, 1:] - axis_center
    cos, sin = np.cos(angles), np.sin(angles)
    twisted = vertices.copy()
    twisted[:, 1] = axis_center[0] + cos * offsets[:, 0] - sin * offsets[:, 1]
    twisted[:, 2] = axis_center[1] + sin * offsets[:, 0] + cos * offsets[:, 1]

    scene["name"] = "twist-bar"
    scene["gravity"] = list(params.get("gravity", [0.0, 0.0, 0.0]))
    scene["initial_state"] = {"positions": twisted.tolist()}
    return scene

def ball_drop(params: Dict[str, Any]) -> Dict[str, Any]:
    """
    Voxelized ball dropped onto a floor at z = 0.

    ``layers`` splits the ball into horizontal slabs of equal height with Young's moduli
    ``young * layers[i]``, bottom first.
    """
    radius = float(params.get("radius", 0.05))
    cells = int(params.get("cells", 4))
    spacing = 2.0 * radius / cells
    gap = float(params.get("gap", 0.005))
    centers = (np.arange(cells) + 0.5) * spacing - radius
    cx, cy, cz = np.meshgrid(centers, centers, centers, indexing='ij')
    mask = cx ** 2 + cy ** 2 + cz ** 2 <= radius ** 2

    mesh = _grid_mesh([cells] * 3, spacing, origin=(-radius, -radius, gap), cell_mask=mask)
    material = _material(params, young=1e6, energy="corotated")
    layers = params.get("layers")
    if layers:
        heights = _centroids(mesh)[:, 2] - gap
        bands = np.minimum((heights / (2.0 * radius) * len(layers)).astype(int), len(layers) - 1)
        material["regions"] = [
            {"name": f"layer{index}", "elements": np.flatnonzero(bands == index).tolist(), "young": material["young"] * float(factor)}
            for index, factor in enumerate(layers)
        ]

    return {
        "name": "ball-drop",
        "mesh": mesh,
        "material": material,
        "dirichlet": [],
        "obstacles": [_floor(float(params.get("friction", 0.0)))],
        "gravity": list(params.get("gravity", GRAVITY)),
        "initial_state": {"velocity": list(params.get("velocity", [0.0, 0.0, -1.0]))},
        "frames": int(params.get("frames", 30)),
    }

def slab_on_sphere(params: Dict[str, Any]) -> Dict[str, Any]:
    """Thin slab draping over a sphere, napkin style."""
    dims = [int(d) for d in params.get("dims", [6, 6, 1])]
    spacing = float(params.get("spacing", 0.02))
    radius = float(params.get("radius", 0.04))
    half = np.array([dims[0], dims[1]], dtype=float) * spacing / 2.0
    mesh = _grid_mesh(dims, spacing, origin=(-half[0], -half[1], radius + float(params.get("gap", 0.002))))

    return {
        "name": "slab-on-sphere",
        "mesh": mesh,
        "material": _material(params, young=5e4),
        "dirichlet": [],
        "obstacles": [{"type": "sphere", "center": [0.0, 0.0, 0.0], "radius": radius,
                       "friction": float(params.get("friction", 0.3))}],
        "gravity": list(params.get("gravity", GRAVITY)),
        "frames": int(params.get("frames", 30)),
    }

def resting_box(params: Dict[str, Any]) -> Dict[str, Any]:
    """Box whose bottom face starts on a frictional floor."""
    dims = [int(d) for d in params.get("dims", [2, 2, 2])]
    spacing = float(params.get("spacing", 0.05))
    return {
        "name": "resting-box",
        "mesh": _grid_mesh(dims, spacing),
        "material": _material(params, young=1e5),
        "dirichlet": [],
        "obstacles": [_floor(float(params.get("friction", 0.5)))],
        "gravity": list(params.get("gravity", GRAVITY)),
        "initial_state": {"velocity": list(params.get("velocity", [0.0, 0.0, 0.0]))},
        "frames": int(params.get("frames", 20)),
    }

GENERATORS: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]] = {
    "two-tet": two_tet,
    "cantilever3": cantilever3,
    "twist-bar": twist_bar,
    "ball-drop": ball_drop,
    "slab-on-sphere": slab_on_sphere,
    "resting-box": resting_box,
}

def generate_scene(name: str, params: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    if name not in GENERATORS:
        raise UnknownGeneratorError(name, GENERATORS)
    scene = GENERATORS[name](dict(params or {}))
    logger.debug(f"Generated scene '{name}' with {len(scene['mesh']['vertices'])} vertices")
    return scene

def resolve_scene_dict(raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Expands a ``{"generator": ..., "params": ...}`` scene and applies the remaining top-level
    sections on top of it; mapping sections are merged key by key, everything else replaces.
    """
    if "generator" not in raw:
        return raw

    resolved = generate_scene(raw["generator"], raw.get("params"))
    for key, value in raw.items():
        if key in ("generator", "params"):
            continue
        if isinstance(value, dict) and isinstance(resolved.get(key), dict):
            merged = copy.deepcopy(resolved[key])
            merged.update(value)
            resolved[key] = merged
        else:
            resolved[key] = copy.deepcopy(value)
    return resolved
