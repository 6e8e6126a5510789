import pytest
import numpy as np
from core.mesh.tet_mesh import build_tet_mesh
from core.mesh.hex_grid import build_hex_cells
from core.material.energy_kind import EnergyKind
from core.material.material_field import build_material_field

TWO_TET_VERTICES = [
    [0.0, 0.0, 0.0],
    [0.1, 0.0, 0.0],
    [0.0, 0.1, 0.0],
    [0.0, 0.0, 0.1],
    [0.1, 0.1, 0.1],
]

@pytest.fixture
def two_tet_mesh():
    """Two tetrahedra sharing the face (1, 2, 3)."""
    return build_tet_mesh(TWO_TET_VERTICES, [[0, 1, 2, 3], [1, 2, 3, 4]], density=1000.0)

@pytest.fixture
def grid_mesh():
    return build_hex_cells((3, 2, 2), 0.05, density=1000.0)

@pytest.fixture
def nh_material(two_tet_mesh):
    return build_material_field(two_tet_mesh, 1e4, 0.3, EnergyKind.NEO_HOOKEAN)

@pytest.fixture
def grid_material(grid_mesh):
    young = np.where(np.arange(grid_mesh.num_elements) % 2 == 0, 1e5, 1e6)
    return build_material_field(grid_mesh, young, 0.3, EnergyKind.COROTATED, alpha=0.5, beta0=0.01)

@pytest.fixture
def valid_config():
    """Fixture providing a valid scene configuration for testing."""
    return {
        "name": "two-tet-test",
        "mesh": {
            "vertices": TWO_TET_VERTICES,
            "elements": [[0, 1, 2, 3], [1, 2, 3, 4]]
        },
        "material": {
            "energy": "neohookean",
            "young": 1e4,
            "poisson": 0.3,
            "density": 1000.0,
            "alpha": 0.0,
            "beta0": 0.0
        },
        "dirichlet": [
            {"vertex": 0, "position": [0.0, 0.0, 0.0]}
        ],
        "obstacles": [],
        "gravity": [0.0, 0.0, -9.81],
        "initial_state": {
            "velocity": [0.0, 0.0, 0.0]
        },
        "solver": {
            "h": 0.01,
            "max_iterations": 200
        },
        "frames": 3,
        "logging": {
            "log_level": "INFO",
            "log_to_file": False
        }
    }
