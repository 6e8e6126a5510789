import logging
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
from core.material.material_field import MaterialField
from core.forward.forward_solver import ForwardSolver
from core.forward.forward_cache import ForwardCache
from core.forward.sim_state import SimState
from core.forward.exceptions import MaxIterationsError
from core.backward.backward_solver import BackwardSolver
from core.backward.gradient_router import AdjointSeed
from scenes.scene import Scene

@dataclass(frozen=True)
class Trajectory:
    """States 0..T and the caches of the T steps between them."""
    states: List[SimState]
    caches: List[ForwardCache]

    @property
    def num_frames(self) -> int:
        return len(self.caches)

    def positions(self) -> np.ndarray:
        return np.stack([state.q for state in self.states])

    def velocities(self) -> np.ndarray:
        return np.stack([state.v for state in self.states])

@dataclass
class StateSeeds:
    """Direct loss gradients dL/dq_t and dL/dv_t for every state index 0..T."""
    dq: np.ndarray
    dv: np.ndarray

    @classmethod
    def zeros(cls, num_states: int, num_vertices: int) -> "StateSeeds":
        return cls(np.zeros((num_states, num_vertices, 3)), np.zeros((num_states, num_vertices, 3)))

@dataclass
class RolloutGradient:
    dL_dq0: np.ndarray
    dL_dv0: np.ndarray
    dL_df_ext: np.ndarray
    dL_dw: np.ndarray
    dL_dE: np.ndarray
    taus: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    adjoint_iterations: List[int] = field(default_factory=list)

class Rollout:
    """
    Multi-frame driver: runs the forward solver over a scene and chains backward steps in reverse.

    One Rollout owns one factor manager, so a fixed material is factorized once for all frames.
    """
    def __init__(self, scene: Scene, material: MaterialField):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.scene = scene
        self.material = material
        self.forward_solver = ForwardSolver(scene.mesh, material, scene.partition, scene.settings,
                                            scene.obstacles, scene.attachments, scene.state_force)
        self.backward_solver = BackwardSolver(scene.mesh, scene.partition, scene.settings, scene.state_force)

    @property
    def refactorization_count(self) -> int:
        return self.forward_solver.factor_manager.refactorization_count

    def set_material(self, material: MaterialField) -> None:
        self.material = material
        self.forward_solver.set_material(material)

    def run(self, initial_state: SimState, forces: np.ndarray) -> Trajectory:
        """
        Args:
            initial_state: State at frame 0.
            forces: (T, n_v, 3) external loads, one slice per step.

        Raises:
            MaxIterationsError: With strict convergence, tagged with the failing frame.
        """
        states = [initial_state]
        caches: List[ForwardCache] = []
        previous = None

        for frame in range(forces.shape[0]):
            try:
                state, cache = self.forward_solver.step(states[-1], forces[frame], previous, frame)
            except MaxIterationsError as e:
                self.logger.error(f"Forward step failed at frame {frame}: {e}")
                raise
            states.append(state)
            caches.append(cache)
            previous = cache
        return Trajectory(states=states, caches=caches)

    def gradients(self, trajectory: Trajectory, seeds: StateSeeds) -> RolloutGradient:
        """Reverse pass: seeds of state t+1 plus the carried adjoint form the seed of step t."""
        factor = self.forward_solver.factor_manager.current(self.material, self.scene.settings.h)
        damping = self.forward_solver.factor_manager.damping
        frames = trajectory.num_frames
        num_vertices = self.scene.num_vertices

        carry_q = np.zeros((num_vertices, 3))
        carry_v = np.zeros((num_vertices, 3))
        d_force = np.zeros((frames, num_vertices, 3))
        d_w = np.zeros_like(self.material.pd_weight)
        d_young = np.zeros(self.material.num_elements)
        taus, ratios, iterations = [], [], []

        for frame in reversed(range(frames)):
            seed = AdjointSeed(seeds.dq[frame + 1] + carry_q, seeds.dv[frame + 1] + carry_v)
            bundle = self.backward_solver.step(trajectory.caches[frame], seed, factor, self.material, damping)
            carry_q, carry_v = bundle.dL_dq_t, bundle.dL_dv_t
            d_force[frame] = bundle.dL_df_ext
            d_w += bundle.dL_dw
            d_young += bundle.dL_dE
            taus.append(bundle.tau_used)
            ratios.append(bundle.tr_ratio)
            iterations.append(bundle.adjoint_iterations)

        return RolloutGradient(
            dL_dq0=carry_q + seeds.dq[0],
            dL_dv0=carry_v + seeds.dv[0],
            dL_df_ext=d_force,
            dL_dw=d_w,
            dL_dE=d_young,
            taus=taus[::-1],
            ratios=ratios[::-1],
            adjoint_iterations=iterations[::-1],
        )

def simulate(scene: Scene, material: Optional[MaterialField] = None) -> Trajectory:
    rollout = Rollout(scene, material or scene.material())
    return rollout.run(scene.initial_state(), scene.external_forces())
