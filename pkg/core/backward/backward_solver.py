import logging
from dataclasses import replace
from typing import Optional
import scipy.sparse as sp
from config.solver_settings import SolverSettings
from core.mesh.tet_mesh import TetMesh
from core.material.material_field import MaterialField
from core.factor.assembly import DofPartition
from core.factor.sparse_factor import SparseFactor
from core.forward.forward_cache import ForwardCache
from core.forward.state_force import StateForce
from .trust_region import tr_select_tau
from .local_jacobian import assemble_db_dq, FreeLocalJacobian
from .adjoint import AdjointSolver, linearize_contacts
from .gradient_router import AdjointSeed, GradientBundle, curvature_gradients, route_gradients
from .exceptions import CacheMismatchError

class BackwardSolver:
    """
    One backward step per forward cache: trust-region blend, filtered db/dq, adjoint, routing.
    A fixed ``backward_projection`` overrides the blend the trust region picks; rho is still reported.

    The blend only enters the differentials built here; forward caches are never modified.
    ``fast_path_count`` and ``kkt_path_count`` record which adjoint branch each step took.
    """
    def __init__(
        self,
        mesh: TetMesh,
        partition: DofPartition,
        settings: SolverSettings,
        state_force: Optional[StateForce] = None
    ):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.mesh = mesh
        self.partition = partition
        self.settings = settings
        self.state_force = state_force
        self.adjoint_solver = AdjointSolver(settings.adjoint_max_iterations, settings.adjoint_tolerance)
        self.fast_path_count = 0
        self.kkt_path_count = 0

    def step(
        self,
        cache: ForwardCache,
        seed: AdjointSeed,
        factor: SparseFactor,
        material: MaterialField,
        damping_matrix: Optional[sp.spmatrix] = None
    ) -> GradientBundle:
        """
        Gradients of a scalar loss with respect to the inputs of the cached step.

        Args:
            cache: Cache of the forward step being differentiated.
            seed: dL/dq_{t+h} and dL/dv_{t+h}.
            factor: The factor the forward step used.
            material: The material the forward step used.
            damping_matrix: Scalar damping block when damping is active.

        Raises:
            CacheMismatchError: If factor or material do not match the cache.
            AdjointDivergedError: If the adjoint solve fails.
        """
        if factor.signature != cache.factor_signature or material.version != cache.material_version:
            raise CacheMismatchError(f"Frame {cache.frame}: factor or material differs from the forward step.")

        choice = tr_select_tau(cache, factor, self.partition, self.mesh, material, self.settings.eps_tr)
        fixed_tau = self.settings.projection.fixed_tau
        if fixed_tau is not None:
            choice = replace(choice, tau=fixed_tau)
        local = FreeLocalJacobian(assemble_db_dq(self.mesh, material, cache.projection, choice.tau), self.partition)
        position_seed = seed.position_seed(cache.h)[self.partition.free]

        contacts = None
        if cache.has_contacts:
            contacts = linearize_contacts(cache.contact_set, cache.contact_solution, cache.jacobian)
            self.kkt_path_count += 1
        else:
            self.fast_path_count += 1

        solution = self.adjoint_solver.solve(factor, local, position_seed, contacts, cache.frame)

        contact_term = None
        if contacts is not None:
            contact_term = curvature_gradients(cache, contacts, solution.mu, solution.nu, self.partition)
            if cache.contact_set.num_friction:
                rows = cache.contact_set.friction_slice()
                contact_term += (contacts.c_matrix[rows].T @ solution.nu[rows]).reshape(-1, 3)

        damping = damping_matrix if (material.alpha > 0 or material.beta0 > 0) else None
        bundle = route_gradients(solution.mu, cache, seed, self.mesh, material, self.partition,
                                 state_force=self.state_force, damping_matrix=damping,
                                 contact_term=contact_term, tau=choice.tau, rho=choice.rho)

        self.logger.debug(f"Frame {cache.frame}: backward tau* = {choice.tau}, rho = {choice.rho:.4f}, "
                          f"{solution.iterations} adjoint iterations{' (contacts)' if contacts else ''}")
        return replace(bundle, adjoint_iterations=solution.iterations, fast_path=contacts is None)

def backward_step(solver: BackwardSolver, cache: ForwardCache, seed: AdjointSeed, factor: SparseFactor,
                  material: MaterialField, damping_matrix: Optional[sp.spmatrix] = None) -> GradientBundle:
    return solver.step(cache, seed, factor, material, damping_matrix)
