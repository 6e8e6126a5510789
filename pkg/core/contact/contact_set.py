import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple
import numpy as np
from core.mesh.tet_mesh import TetMesh
from .obstacle import Obstacle

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Attachment:
    """Bilateral row: direction . q_vertex = target."""
    vertex: int
    direction: np.ndarray
    target: float

def tangent_basis(normal: np.ndarray) -> np.ndarray:
    """
    Orthonormal tangents (t1, t2) completing a unit normal.

    t1 is n x e_k with e_k the axis of the smallest |n_k| (lowest index on ties), t2 = n x t1.

    Returns:
        np.ndarray: (..., 2, 3).
    """
    normal = np.atleast_2d(np.asarray(normal, dtype=float))
    axes = np.eye(3)[np.argmin(np.abs(normal), axis=-1)]
    first = np.cross(normal, axes)
    first /= np.linalg.norm(first, axis=-1, keepdims=True)
    second = np.cross(normal, first)
    return np.stack([first, second], axis=-2)

def cross_matrix(vector: np.ndarray) -> np.ndarray:
    x, y, z = vector
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])

def tangent_basis_jacobian(normal: np.ndarray) -> np.ndarray:
    """
    Derivatives of the two tangents of ``tangent_basis`` with respect to the normal.

    The reference axis is held fixed, which it is away from ties between normal components.

    Returns:
        np.ndarray: (2, 3, 3); entry [k] is d t_k / d n.
    """
    normal = np.asarray(normal, dtype=float)
    axis = np.eye(3)[np.argmin(np.abs(normal))]
    raw = np.cross(normal, axis)
    length = np.linalg.norm(raw)
    first = raw / length
    d_first = -(np.eye(3) - np.outer(first, first)) @ cross_matrix(axis) / length
    d_second = cross_matrix(normal) @ d_first - cross_matrix(first)
    return np.stack([d_first, d_second])

@dataclass(frozen=True)
class ContactSet:
    """
    Active constraint rows for one time step.

    Multipliers are stacked as normals, then bilateral rows, then friction pairs (t1, t2) for
    every contact with a positive friction coefficient, in contact order.
    """
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    tangents: np.ndarray
    obstacle_ids: np.ndarray
    friction: np.ndarray
    attachments: Tuple[Attachment, ...] = ()
    frictional: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    curvature: Optional[np.ndarray] = None

    @property
    def num_normal(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def num_bilateral(self) -> int:
        return len(self.attachments)

    @property
    def num_friction(self) -> int:
        return 2 * int(self.frictional.shape[0])

    @property
    def num_rows(self) -> int:
        return self.num_normal + self.num_bilateral + self.num_friction

    @property
    def is_empty(self) -> bool:
        return self.num_rows == 0

    def normal_slice(self) -> slice:
        return slice(0, self.num_normal)

    def bilateral_slice(self) -> slice:
        return slice(self.num_normal, self.num_normal + self.num_bilateral)

    def friction_slice(self) -> slice:
        start = self.num_normal + self.num_bilateral
        return slice(start, start + self.num_friction)

    def normal_curvature(self) -> np.ndarray:
        """Per-contact obstacle curvature at detection; zero for flat obstacles or when not recorded."""
        if self.curvature is None:
            return np.zeros(self.num_normal)
        return self.curvature

    def keys(self) -> List[Tuple[int, int]]:
        return list(zip(self.vertices.tolist(), self.obstacle_ids.tolist()))

    def row_vertices(self) -> np.ndarray:
        friction_vertices = np.repeat(self.vertices[self.frictional], 2)
        bilateral_vertices = np.array([attachment.vertex for attachment in self.attachments], dtype=np.int64)
        return np.concatenate([self.vertices, bilateral_vertices, friction_vertices]).astype(np.int64)

    def row_directions(self) -> np.ndarray:
        bilateral = np.array([attachment.direction for attachment in self.attachments], dtype=float).reshape(-1, 3)
        friction = self.tangents[self.frictional].reshape(-1, 3)
        return np.concatenate([self.normals.reshape(-1, 3), bilateral, friction])

    def jacobian(self, free_index: np.ndarray, num_free: int) -> np.ndarray:
        """
        Constraint rows in per-vertex form over free vertices.

        Returns:
            np.ndarray: (K, num_free, 3); row c holds its direction at the vertex it touches.
        """
        rows = np.zeros((self.num_rows, num_free, 3))
        if self.num_rows:
            columns = free_index[self.row_vertices()]
            rows[np.arange(self.num_rows), columns] = self.row_directions()
        return rows

    def targets(self) -> np.ndarray:
        """Constant offsets: gap offsets g_c for normals, targets for bilateral rows, 0 for friction."""
        bilateral = np.array([attachment.target for attachment in self.attachments], dtype=float)
        return np.concatenate([self.offsets, bilateral, np.zeros(self.num_friction)])

    def warm_start(self, previous: Optional["ContactSet"], multipliers: Optional[np.ndarray]) -> np.ndarray:
        """Initial multipliers, copied from a previous set for matching (vertex, obstacle) pairs."""
        start = np.zeros(self.num_rows)
        if previous is None or multipliers is None or previous.num_rows == 0:
            return start

        lookup = {key: index for index, key in enumerate(previous.keys())}
        previous_pair = {contact: pair for pair, contact in enumerate(previous.frictional.tolist())}
        own_pair = {contact: pair for pair, contact in enumerate(self.frictional.tolist())}
        own_friction = self.friction_slice().start
        previous_friction = previous.friction_slice().start

        for index, key in enumerate(self.keys()):
            match = lookup.get(key)
            if match is None:
                continue
            start[index] = max(multipliers[match], 0.0)
            if index in own_pair and match in previous_pair:
                source = previous_friction + 2 * previous_pair[match]
                target = own_friction + 2 * own_pair[index]
                start[target:target + 2] = multipliers[source:source + 2]

        return start

def empty_contact_set(attachments: Sequence[Attachment] = ()) -> ContactSet:
    return ContactSet(
        vertices=np.zeros(0, dtype=np.int64),
        normals=np.zeros((0, 3)),
        offsets=np.zeros(0),
        tangents=np.zeros((0, 2, 3)),
        obstacle_ids=np.zeros(0, dtype=np.int64),
        friction=np.zeros(0),
        attachments=tuple(attachments),
    )

def detect_contacts(
    mesh: TetMesh,
    q: np.ndarray,
    obstacles: Sequence[Obstacle],
    margin: float,
    q_predicted: Optional[np.ndarray] = None,
    excluded: Iterable[int] = (),
    attachments: Sequence[Attachment] = ()
) -> ContactSet:
    """
    Vertex-versus-obstacle proximity query.

    A boundary vertex enters when its signed distance at q (or at ``q_predicted``) is at most
    ``margin``. Normals and gap offsets are taken at q, so delta_c = n_c . q_v - g_c.

    Args:
        mesh: The mesh; only boundary vertices are tested.
        q: (n_v, 3) current positions.
        obstacles: Obstacles in scene order.
        margin: Detection margin in metres, non-negative.
        q_predicted: Optional second configuration, typically the free-fall target.
        excluded: Vertices that never become candidates (Dirichlet vertices).
        attachments: Bilateral rows appended after the normal rows.
    """
    if margin < 0:
        raise ValueError(f"Contact margin must be non-negative, got {margin}.")

    candidates = np.setdiff1d(mesh.boundary_vertices(), np.asarray(list(excluded), dtype=np.int64))
    q = np.asarray(q, dtype=float)
    vertices, normals, offsets, obstacle_ids, friction, curvature = [], [], [], [], [], []

    for obstacle_id, obstacle in enumerate(obstacles):
        if candidates.size == 0:
            break
        points = q[candidates]
        distances, unit_normals = obstacle.signed_distance(points)
        curvatures = obstacle.curvature(points)
        near = distances <= margin
        if q_predicted is not None:
            predicted, _ = obstacle.signed_distance(np.asarray(q_predicted, dtype=float)[candidates])
            near |= predicted <= margin

        for local in np.flatnonzero(near):
            vertices.append(int(candidates[local]))
            normals.append(unit_normals[local])
            offsets.append(float(unit_normals[local] @ points[local] - distances[local]))
            obstacle_ids.append(obstacle_id)
            friction.append(obstacle.friction)
            curvature.append(float(curvatures[local]))

    if not vertices:
        return empty_contact_set(attachments)

    normals = np.array(normals)
    friction = np.array(friction)
    contact_set = ContactSet(
        vertices=np.array(vertices, dtype=np.int64),
        normals=normals,
        offsets=np.array(offsets),
        tangents=tangent_basis(normals),
        obstacle_ids=np.array(obstacle_ids, dtype=np.int64),
        friction=friction,
        attachments=tuple(attachments),
        frictional=np.flatnonzero(friction > 0).astype(np.int64),
        curvature=np.array(curvature),
    )
    logger.debug(f"Detected {contact_set.num_normal} contacts ({contact_set.num_friction // 2} frictional)")
    return contact_set
