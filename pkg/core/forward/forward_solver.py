import logging
from typing import Optional, Sequence, Tuple
import numpy as np
from config.solver_settings import SolverSettings
from core.mesh.tet_mesh import TetMesh
from core.material.material_field import MaterialField
from core.factor.assembly import DofPartition
from core.factor.factor_manager import FactorManager
from core.factor.delassus import delassus
from core.localstep.element_projection import local_step
from core.contact.obstacle import Obstacle
from core.contact.contact_set import Attachment, detect_contacts
from core.contact.contact_solver import ContactSolver
from .anderson import AndersonHistory
from .convergence import dual_gate, gate_residuals
from .forward_cache import ForwardCache
from .free_fall import free_fall_target, pd_rhs, damping_load
from .sim_state import SimState
from .state_force import StateForce
from .exceptions import MaxIterationsError

class ForwardSolver:
    """
    Advances a deformable body one implicit step at a time with the PD local/global loop.

    The global operator is factorized once per material/time-step signature and shared by
    every step; contacts are detected once per step and coupled through the Delassus block.
    """
    def __init__(
        self,
        mesh: TetMesh,
        material: MaterialField,
        partition: DofPartition,
        settings: SolverSettings,
        obstacles: Sequence[Obstacle] = (),
        attachments: Sequence[Attachment] = (),
        state_force: Optional[StateForce] = None
    ):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.mesh = mesh
        self.material = material
        self.partition = partition
        self.settings = settings
        self.obstacles = tuple(obstacles)
        self.attachments = tuple(attachments)
        self.state_force = state_force or StateForce()
        self.factor_manager = FactorManager(mesh, partition, reuse=settings.reuse_factor)
        self.contact_solver = ContactSolver(settings.contact_inner_iterations, settings.contact_tolerance)

    def set_material(self, material: MaterialField) -> None:
        """Swaps the material; the factor is rebuilt lazily on the next step if the signature changed."""
        self.material = material

    def aa_window(self) -> int:
        return self.settings.window_for(self.material.heterogeneity_ratio())

    def step(self, state: SimState, f_ext: np.ndarray, prev_cache: Optional[ForwardCache] = None,
             frame: int = 0) -> Tuple[SimState, ForwardCache]:
        """
        One forward step.

        Args:
            state: State at time t.
            f_ext: (n_v, 3) external force for this step (gravity included).
            prev_cache: Cache of the previous step, used to warm-start contact multipliers.
            frame: Frame index for logging and errors.

        Returns:
            Tuple: (state at t + h, immutable cache for the backward pass).

        Raises:
            MaxIterationsError: Only with ``strict_convergence`` when the gate never fires.
        """
        settings = self.settings
        h = settings.h
        mesh, material, partition = self.mesh, self.material, self.partition
        free, fixed = partition.free, partition.fixed

        factor = self.factor_manager.ensure(material, h)
        f_ext = np.asarray(f_ext, dtype=float)
        f_state = self.state_force.force(state.q, state.v)
        q_tilde = free_fall_target(state, f_ext, f_state, mesh, h)
        damping = None
        if material.alpha > 0 or material.beta0 > 0:
            damping = damping_load(self.factor_manager.damping, state.q, h)

        contact_set = detect_contacts(mesh, state.q, self.obstacles, settings.contact_margin,
                                      q_predicted=q_tilde, excluded=fixed.tolist(), attachments=self.attachments)
        block, jacobian, multipliers = None, None, None
        if not contact_set.is_empty:
            jacobian = contact_set.jacobian(partition.free_index, partition.num_free)
            block = delassus(factor, jacobian)
            if prev_cache is not None:
                multipliers = contact_set.warm_start(prev_cache.contact_set, prev_cache.lambda_star)

        q = state.q.copy()
        q[fixed] = partition.prescribed
        dirichlet = self.factor_manager.dirichlet_load()
        start_free = state.q[free]
        history = AndersonHistory(self.aa_window())

        previous_rhs = None
        q_prev = q
        solution = None
        converged = False
        step_residual = rhs_residual = np.inf
        iteration = 0

        for iteration in range(settings.max_iterations):
            projection = local_step(mesh, material, q)
            b = pd_rhs(mesh, material, q_tilde, projection, h, damping)
            unconstrained = factor.apply_inverse(b[free] - dirichlet)

            solution = self.contact_solver.solve(contact_set, block, jacobian, unconstrained, start_free, h, multipliers)
            multipliers = solution.multipliers if solution.multipliers.size else None

            q_next = q.copy()
            q_next[free] = history.mix(q[free], solution.positions - q[free])

            if previous_rhs is not None:
                step_residual, rhs_residual = gate_residuals(q, q_next, previous_rhs, b)
                converged = dual_gate(q, q_next, previous_rhs, b, settings.eps_rel, settings.eps_abs, iteration)

            self.logger.debug(f"Frame {frame} iteration {iteration}: step {step_residual:.3e}, rhs {rhs_residual:.3e}")
            q_prev, q, previous_rhs = q, q_next, b
            if converged:
                break

        iterations = iteration + 1
        if converged:
            self.logger.info(f"Frame {frame}: converged in {iterations} iterations "
                             f"({contact_set.num_normal} contacts, window {history.window}, {history.guard_trips} guard trips)")
        else:
            self.logger.warning(f"Frame {frame}: reached {iterations} iterations without passing the gate "
                                f"(step {step_residual:.3e}, rhs {rhs_residual:.3e})")
            if settings.strict_convergence:
                raise MaxIterationsError(frame, iterations, step_residual, rhs_residual)

        projection = local_step(mesh, material, q)
        v_next = (q - state.q) / h
        cache = ForwardCache(
            frame=frame,
            h=h,
            q_start=state.q.copy(),
            v_start=state.v.copy(),
            q_tilde=q_tilde,
            q_prev_iterate=q_prev.copy(),
            q_star=q.copy(),
            v_next=v_next.copy(),
            f_ext=f_ext.copy(),
            projection=projection,
            contact_set=contact_set,
            contact_solution=solution,
            delassus=block,
            jacobian=jacobian,
            iteration_count=iterations,
            converged=converged,
            step_residual=float(step_residual),
            rhs_residual=float(rhs_residual),
            material_version=material.version,
            factor_signature=factor.signature,
        )
        return SimState(q=q, v=v_next, time=state.time + h), cache

def forward_step(solver: ForwardSolver, state: SimState, f_ext: np.ndarray,
                 prev_cache: Optional[ForwardCache] = None, frame: int = 0) -> Tuple[SimState, ForwardCache]:
    return solver.step(state, f_ext, prev_cache, frame)
