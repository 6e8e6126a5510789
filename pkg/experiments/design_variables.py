import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
from config.design_variable_kind import DesignVariableKind
from core.material.material_field import MaterialField
from core.forward.sim_state import SimState
from scenes.scene import Scene
from scenes.rigid_transform import centroid, euler_derivatives
from .rollout import RolloutGradient

@dataclass(frozen=True)
class DesignPoint:
    region_values: np.ndarray
    translation: np.ndarray
    rotation: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray

class DesignSpace:
    """
    Flat parameter vector over a subset of scene inputs.

    Young's moduli enter as logs of the populated region values, so every trial point is
    positive. The material means are frozen at ``frozen_means`` when given.
    """
    def __init__(self, scene: Scene, kinds: Sequence[DesignVariableKind],
                 frozen_means: Optional[Tuple[float, float]] = None):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.scene = scene
        self.kinds = list(dict.fromkeys(kinds))
        self.frozen_means = frozen_means
        self.regions = scene.material_spec.populated_regions()
        self.slices: Dict[DesignVariableKind, slice] = {}
        start = 0
        for kind in self.kinds:
            size = self._size(kind)
            self.slices[kind] = slice(start, start + size)
            start += size
        self.size = start

    def _size(self, kind: DesignVariableKind) -> int:
        if kind == DesignVariableKind.YOUNG:
            return int(self.regions.size)
        if kind == DesignVariableKind.FORCE:
            return 3 * self.scene.frames
        return 3

    def nominal(self) -> DesignPoint:
        scene = self.scene
        return DesignPoint(
            region_values=scene.material_spec.region_young(),
            translation=scene.initial_translation.copy(),
            rotation=scene.initial_rotation.copy(),
            velocity=scene.initial_velocity.copy(),
            acceleration=scene.acceleration.copy(),
        )

    def encode(self, point: DesignPoint) -> np.ndarray:
        x = np.zeros(self.size)
        for kind, block in self.slices.items():
            if kind == DesignVariableKind.YOUNG:
                x[block] = np.log(point.region_values[self.regions])
            elif kind == DesignVariableKind.TRANSLATION:
                x[block] = point.translation
            elif kind == DesignVariableKind.ORIENTATION:
                x[block] = point.rotation
            elif kind == DesignVariableKind.VELOCITY:
                x[block] = point.velocity
            else:
                x[block] = point.acceleration.ravel()
        return x

    def decode(self, x: np.ndarray) -> DesignPoint:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise ValueError(f"Expected a design vector of size {self.size}, got shape {x.shape}.")
        nominal = self.nominal()
        region_values = nominal.region_values.copy()
        translation, rotation, velocity = nominal.translation, nominal.rotation, nominal.velocity
        acceleration = nominal.acceleration

        for kind, block in self.slices.items():
            if kind == DesignVariableKind.YOUNG:
                region_values[self.regions] = np.exp(x[block])
            elif kind == DesignVariableKind.TRANSLATION:
                translation = x[block].copy()
            elif kind == DesignVariableKind.ORIENTATION:
                rotation = x[block].copy()
            elif kind == DesignVariableKind.VELOCITY:
                velocity = x[block].copy()
            else:
                acceleration = x[block].reshape(self.scene.frames, 3)
        return DesignPoint(region_values, translation, rotation, velocity, acceleration)

    def initial_vector(self, overrides: Optional[Dict[str, Any]] = None) -> np.ndarray:
        """
        Nominal design with optional starting values keyed by variable name: "E" lists one
        modulus per populated region (or one for all), the others give their raw values.
        """
        point = self.nominal()
        values = {}
        for name, value in (overrides or {}).items():
            kind = DesignVariableKind.from_string(name)
            value = np.asarray(value, dtype=float)
            if kind == DesignVariableKind.YOUNG:
                region_values = point.region_values.copy()
                region_values[self.regions] = np.broadcast_to(value, self.regions.shape)
                values['region_values'] = region_values
            elif kind == DesignVariableKind.FORCE:
                values['acceleration'] = np.broadcast_to(value.reshape(-1, 3), (self.scene.frames, 3)).copy()
            else:
                values[{DesignVariableKind.TRANSLATION: 'translation', DesignVariableKind.ORIENTATION: 'rotation',
                        DesignVariableKind.VELOCITY: 'velocity'}[kind]] = value
        point = DesignPoint(**{**point.__dict__, **values})
        return self.encode(point)

    def material(self, point: DesignPoint) -> MaterialField:
        return self.scene.material(point.region_values, self.frozen_means)

    def initial_state(self, point: DesignPoint) -> SimState:
        return self.scene.initial_state(point.translation, point.rotation, point.velocity)

    def forces(self, point: DesignPoint) -> np.ndarray:
        return self.scene.external_forces(point.acceleration)

    def chain(self, point: DesignPoint, gradient: RolloutGradient) -> np.ndarray:
        """dL/dx from the per-entry rollout gradients."""
        scene = self.scene
        free = scene.partition.free
        g = np.zeros(self.size)

        for kind, block in self.slices.items():
            if kind == DesignVariableKind.YOUNG:
                spec = scene.material_spec
                pattern = scene.material(point.region_values, self.frozen_means).young / point.region_values[spec.region_index]
                per_region = np.bincount(spec.region_index, weights=gradient.dL_dE * pattern, minlength=spec.num_regions)
                g[block] = point.region_values[self.regions] * per_region[self.regions]
            elif kind == DesignVariableKind.TRANSLATION:
                g[block] = gradient.dL_dq0[free].sum(axis=0)
            elif kind == DesignVariableKind.ORIENTATION:
                arms = scene.initial_positions - centroid(scene.initial_positions, scene.mesh.vertex_mass)
                derivatives = euler_derivatives(point.rotation)
                g[block] = np.einsum('vi,kij,vj->k', gradient.dL_dq0[free], derivatives, arms[free])
            elif kind == DesignVariableKind.VELOCITY:
                g[block] = gradient.dL_dv0[free].sum(axis=0)
            else:
                g[block] = np.einsum('v,tvi->ti', scene.mesh.vertex_mass, gradient.dL_df_ext).ravel()
        return g

    def describe(self, x: np.ndarray) -> Dict[str, Any]:
        point = self.decode(x)
        names = self.scene.material_spec.region_names
        summary: Dict[str, Any] = {}
        for kind in self.kinds:
            if kind == DesignVariableKind.YOUNG:
                summary["E"] = {names[r]: float(point.region_values[r]) for r in self.regions}
            elif kind == DesignVariableKind.TRANSLATION:
                summary["translation"] = point.translation.tolist()
            elif kind == DesignVariableKind.ORIENTATION:
                summary["orientation"] = point.rotation.tolist()
            elif kind == DesignVariableKind.VELOCITY:
                summary["velocity"] = point.velocity.tolist()
            else:
                summary["force"] = point.acceleration.tolist()
        return summary

def parse_kinds(names: List[str]) -> List[DesignVariableKind]:
    return [DesignVariableKind.from_string(name) for name in names]
