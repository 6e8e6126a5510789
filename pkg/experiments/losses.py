from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple
import numpy as np
from config.loss_kind import LossKind
from core.mesh.tet_mesh import TetMesh
from .rollout import Trajectory, StateSeeds

class Loss(ABC):
    """Scalar objective over a trajectory, returning its value and the direct state seeds."""

    @abstractmethod
    def evaluate(self, trajectory: Trajectory) -> Tuple[float, StateSeeds]:
        pass

def _frame_index(frame: int, num_states: int) -> int:
    index = frame if frame >= 0 else num_states + frame
    if not 0 <= index < num_states:
        raise ValueError(f"Frame {frame} is outside the trajectory of {num_states} states.")
    return index

class TargetCenterOfMass(Loss):
    """0.5 |c(q_k) - target|^2 with c the mass-weighted center at state k."""
    def __init__(self, mesh: TetMesh, target, frame: int = -1):
        self.weights = mesh.vertex_mass / mesh.vertex_mass.sum()
        self.target = np.asarray(target, dtype=float)
        self.frame = frame

    def center(self, trajectory: Trajectory) -> np.ndarray:
        index = _frame_index(self.frame, len(trajectory.states))
        return self.weights @ trajectory.states[index].q

    def evaluate(self, trajectory: Trajectory) -> Tuple[float, StateSeeds]:
        num_states = len(trajectory.states)
        index = _frame_index(self.frame, num_states)
        offset = self.weights @ trajectory.states[index].q - self.target
        seeds = StateSeeds.zeros(num_states, self.weights.size)
        seeds.dq[index] = self.weights[:, None] * offset[None, :]
        return 0.5 * float(offset @ offset), seeds

class TrajectoryMatch(Loss):
    """
    Mass-weighted mean squared distance to a reference over states 1..T,
    normalized by the frame count and a squared length scale.
    """
    def __init__(self, mesh: TetMesh, reference: np.ndarray, length_scale: float = 1.0):
        self.weights = mesh.vertex_mass / mesh.vertex_mass.sum()
        self.reference = np.asarray(reference, dtype=float)
        self.length_scale = float(length_scale)

    def evaluate(self, trajectory: Trajectory) -> Tuple[float, StateSeeds]:
        positions = trajectory.positions()
        if positions.shape != self.reference.shape:
            raise ValueError(f"Reference shape {self.reference.shape} does not match trajectory {positions.shape}.")
        scale = 1.0 / (trajectory.num_frames * self.length_scale ** 2)
        residual = positions - self.reference
        residual[0] = 0.0
        seeds = StateSeeds.zeros(positions.shape[0], positions.shape[1])
        seeds.dq[:] = scale * self.weights[None, :, None] * residual
        value = 0.5 * scale * float(np.sum(self.weights[None, :, None] * residual ** 2))
        return value, seeds

class FinalPose(Loss):
    """0.5 sum_v (m_v / m) |q_T,v - reference_v|^2 / length_scale^2."""
    def __init__(self, mesh: TetMesh, reference: np.ndarray, length_scale: float = 1.0):
        self.weights = mesh.vertex_mass / mesh.vertex_mass.sum()
        self.reference = np.asarray(reference, dtype=float)
        self.length_scale = float(length_scale)

    def evaluate(self, trajectory: Trajectory) -> Tuple[float, StateSeeds]:
        residual = trajectory.states[-1].q - self.reference
        scale = 1.0 / self.length_scale ** 2
        seeds = StateSeeds.zeros(len(trajectory.states), self.weights.size)
        seeds.dq[-1] = scale * self.weights[:, None] * residual
        return 0.5 * scale * float(np.sum(self.weights[:, None] * residual ** 2)), seeds

class RandomLinearLoss(Loss):
    """Random linear functional of every state after the first; exact for gradient checks."""
    def __init__(self, num_states: int, num_vertices: int, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.position_weights = rng.standard_normal((num_states, num_vertices, 3))
        self.velocity_weights = rng.standard_normal((num_states, num_vertices, 3))
        self.position_weights[0] = 0.0
        self.velocity_weights[0] = 0.0

    def evaluate(self, trajectory: Trajectory) -> Tuple[float, StateSeeds]:
        positions = trajectory.positions()
        velocities = trajectory.velocities()
        value = float(np.sum(self.position_weights * positions) + np.sum(self.velocity_weights * velocities))
        return value, StateSeeds(self.position_weights.copy(), self.velocity_weights.copy())

def build_loss(spec: Dict[str, Any], mesh: TetMesh, reference: Optional[np.ndarray] = None,
               length_scale: float = 1.0) -> Loss:
    """
    Args:
        spec: The "loss" section of a problem file.
        reference: Reference positions, (T+1, n_v, 3) for trajectory matching or (n_v, 3) for a final pose.
    """
    kind = LossKind.from_string(spec.get('type', ''))
    if kind == LossKind.TARGET_COM:
        return TargetCenterOfMass(mesh, spec['target'], int(spec.get('frame', -1)))
    if kind == LossKind.RANDOM_LINEAR:
        return RandomLinearLoss(int(spec['num_states']), mesh.num_vertices, int(spec.get('seed', 0)))
    if reference is None:
        raise ValueError(f"The {kind.value} loss needs reference positions.")
    if kind == LossKind.TRAJECTORY_MATCH:
        return TrajectoryMatch(mesh, reference, length_scale)
    return FinalPose(mesh, reference[-1] if reference.ndim == 3 else reference, length_scale)
