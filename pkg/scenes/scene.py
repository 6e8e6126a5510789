from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Tuple
import numpy as np
from config.solver_settings import SolverSettings
from core.mesh.tet_mesh import TetMesh
from core.material.energy_kind import EnergyKind
from core.material.material_field import MaterialField, build_material_field
from core.factor.assembly import DofPartition
from core.contact.obstacle import Obstacle
from core.contact.contact_set import Attachment
from core.forward.sim_state import SimState
from core.forward.state_force import StateForce
from .rigid_transform import rigid_transform

@dataclass(frozen=True)
class MaterialSpec:
    """
    Nominal material of a scene, grouped into regions.

    Region 0 holds the elements no named region claims. Region values scale the nominal
    per-element moduli, so a region's value is the mean modulus of its elements.
    """
    energy_kind: EnergyKind
    poisson: float
    element_young: np.ndarray
    region_index: np.ndarray
    region_names: Tuple[str, ...]
    log_volume_barrier: bool = False
    alpha: float = 0.0
    beta0: float = 0.0

    @property
    def num_regions(self) -> int:
        return len(self.region_names)

    def populated_regions(self) -> np.ndarray:
        counts = np.bincount(self.region_index, minlength=self.num_regions)
        return np.flatnonzero(counts > 0)

    def region_young(self) -> np.ndarray:
        """Mean nominal modulus per region; NaN for regions without elements."""
        counts = np.bincount(self.region_index, minlength=self.num_regions)
        sums = np.bincount(self.region_index, weights=self.element_young, minlength=self.num_regions)
        with np.errstate(invalid='ignore', divide='ignore'):
            return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)

    def element_young_for(self, region_values: Sequence[float]) -> np.ndarray:
        """Per-element moduli when region r is set to region_values[r]."""
        region_values = np.asarray(region_values, dtype=float)
        if region_values.shape != (self.num_regions,):
            raise ValueError(f"Expected {self.num_regions} region values, got shape {region_values.shape}.")
        pattern = self.element_young / self.region_young()[self.region_index]
        return region_values[self.region_index] * pattern

@dataclass(frozen=True)
class Scene:
    name: str
    mesh: TetMesh
    material_spec: MaterialSpec
    partition: DofPartition
    obstacles: Tuple[Obstacle, ...]
    attachments: Tuple[Attachment, ...]
    gravity: np.ndarray
    acceleration: np.ndarray
    initial_positions: np.ndarray
    initial_velocity: np.ndarray
    initial_translation: np.ndarray
    initial_rotation: np.ndarray
    settings: SolverSettings
    frames: int
    state_force: Optional[StateForce] = None

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError(f"A scene needs at least one frame, got {self.frames}.")
        if self.acceleration.shape != (self.frames, 3):
            raise ValueError(f"Acceleration profile must be ({self.frames}, 3), got {self.acceleration.shape}.")

    @property
    def num_vertices(self) -> int:
        return self.mesh.num_vertices

    def material(self, region_values: Optional[Sequence[float]] = None,
                 frozen_means: Optional[Sequence[float]] = None) -> MaterialField:
        spec = self.material_spec
        young = spec.element_young if region_values is None else spec.element_young_for(region_values)
        return self.element_material(young, frozen_means)

    def element_material(self, young: np.ndarray, frozen_means: Optional[Sequence[float]] = None) -> MaterialField:
        """Material with explicit per-element moduli and the scene's other material settings."""
        spec = self.material_spec
        return build_material_field(self.mesh, young, spec.poisson, spec.energy_kind, spec.log_volume_barrier,
                                    spec.alpha, spec.beta0, frozen_means)

    def initial_state(self, translation: Optional[Any] = None, rotation: Optional[Any] = None,
                      velocity: Optional[Any] = None) -> SimState:
        """
        Initial positions rigidly moved about their mass centroid, with a uniform velocity.

        Dirichlet vertices keep their prescribed positions and start at rest.
        """
        translation = self.initial_translation if translation is None else translation
        rotation = self.initial_rotation if rotation is None else rotation
        velocity = self.initial_velocity if velocity is None else velocity

        q = rigid_transform(self.initial_positions, self.mesh.vertex_mass, translation, rotation)
        v = np.tile(np.asarray(velocity, dtype=float), (self.num_vertices, 1))
        q[self.partition.fixed] = self.partition.prescribed
        v[self.partition.fixed] = 0.0
        return SimState(q=q, v=v)

    def external_forces(self, acceleration: Optional[np.ndarray] = None) -> np.ndarray:
        """Per-frame vertex loads m_v (g + a_k) as (frames, n_v, 3)."""
        acceleration = self.acceleration if acceleration is None else np.asarray(acceleration, dtype=float)
        total = self.gravity[None, :] + acceleration
        return self.mesh.vertex_mass[None, :, None] * total[:, None, :]

    def with_settings(self, **changes: Any) -> "Scene":
        return replace(self, settings=self.settings.overridden(**changes))
