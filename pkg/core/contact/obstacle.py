from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple
import numpy as np
from .exceptions import InvalidObstacleError

class ObstacleKind(Enum):
    HALFSPACE = "halfspace"
    SPHERE = "sphere"

    @staticmethod
    def from_string(kind_str: str):
        try:
            return ObstacleKind(kind_str)
        except ValueError:
            raise ValueError(f"Invalid obstacle type: '{kind_str}'. Available obstacle types are: {', '.join([kind.value for kind in ObstacleKind])}")

@dataclass(frozen=True)
class Obstacle:
    """Analytic obstacle; half-spaces keep {x : n.x >= offset} free, spheres keep their exterior free."""
    kind: ObstacleKind
    friction: float = 0.0
    normal: Optional[np.ndarray] = None
    offset: float = 0.0
    center: Optional[np.ndarray] = None
    radius: float = 0.0

    @classmethod
    def half_space(cls, normal, offset: float = 0.0, friction: float = 0.0) -> "Obstacle":
        normal = np.asarray(normal, dtype=float)
        length = np.linalg.norm(normal)
        if normal.shape != (3,) or length == 0:
            raise InvalidObstacleError(f"Half-space normal must be a non-zero 3-vector, got {normal.tolist()}.")
        if friction < 0:
            raise InvalidObstacleError(f"Friction coefficient must be non-negative, got {friction}.")
        normal = normal / length
        normal.setflags(write=False)
        return cls(kind=ObstacleKind.HALFSPACE, friction=float(friction), normal=normal, offset=float(offset))

    @classmethod
    def sphere(cls, center, radius: float, friction: float = 0.0) -> "Obstacle":
        center = np.asarray(center, dtype=float)
        if center.shape != (3,):
            raise InvalidObstacleError(f"Sphere center must be a 3-vector, got {center.tolist()}.")
        if radius <= 0:
            raise InvalidObstacleError(f"Sphere radius must be positive, got {radius}.")
        if friction < 0:
            raise InvalidObstacleError(f"Friction coefficient must be non-negative, got {friction}.")
        center.setflags(write=False)
        return cls(kind=ObstacleKind.SPHERE, friction=float(friction), center=center, radius=float(radius))

    def signed_distance(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Signed distance and outward unit normal at each point.

        Returns:
            Tuple: (distances (n,), normals (n, 3)); negative distance means penetration.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))

        if self.kind == ObstacleKind.HALFSPACE:
            distances = points @ self.normal - self.offset
            return distances, np.broadcast_to(self.normal, points.shape).copy()

        offsets = points - self.center
        lengths = np.linalg.norm(offsets, axis=1)
        normals = np.tile([0.0, 0.0, 1.0], (points.shape[0], 1))
        away = lengths > 0
        normals[away] = offsets[away] / lengths[away, None]
        return lengths - self.radius, normals

    def curvature(self, points: np.ndarray) -> np.ndarray:
        """Rate at which the contact normal turns per unit tangential motion of the point: 1/|x - c| on spheres, 0 on half-spaces."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == ObstacleKind.HALFSPACE:
            return np.zeros(points.shape[0])
        lengths = np.linalg.norm(points - self.center, axis=1)
        return np.divide(1.0, lengths, out=np.zeros_like(lengths), where=lengths > 0)

def obstacle_from_dict(spec: Dict[str, Any]) -> Obstacle:
    kind = ObstacleKind.from_string(spec.get("type", ""))
    friction = float(spec.get("friction", 0.0))

    if kind == ObstacleKind.HALFSPACE:
        return Obstacle.half_space(spec["normal"], spec.get("offset", 0.0), friction)
    return Obstacle.sphere(spec["center"], spec["radius"], friction)
