import logging
import pytest
import numpy as np
from config.solver_settings import SolverSettings
from core.contact.obstacle import Obstacle
from core.factor.assembly import build_partition
from core.forward.exceptions import MaxIterationsError
from core.forward.forward_solver import ForwardSolver, forward_step
from core.forward.sim_state import SimState
from core.material.energy_kind import EnergyKind
from core.material.material_field import build_material_field
from utils.constants import GRAVITY

def _gravity(mesh):
    return mesh.vertex_mass[:, None] * np.array(GRAVITY)

def _pinned_partition(mesh, vertex=0):
    return build_partition(mesh.num_vertices, [(vertex, mesh.rest_positions[vertex])])

def _run(solver, mesh, frames):
    state = SimState.at_rest(mesh.rest_positions)
    cache = None
    states, caches = [], []
    for frame in range(frames):
        state, cache = solver.step(state, _gravity(mesh), cache, frame)
        states.append(state)
        caches.append(cache)
    return states, caches

class TestForwardSolver:
    def test_free_fall_matches_implicit_euler_ballistics(self, two_tet_mesh, nh_material):
        h = 0.01
        partition = build_partition(two_tet_mesh.num_vertices)
        solver = ForwardSolver(two_tet_mesh, nh_material, partition, SolverSettings(h=h))

        states, caches = _run(solver, two_tet_mesh, 5)

        g = np.array(GRAVITY)
        for frame, state in enumerate(states, start=1):
            np.testing.assert_allclose(state.q, two_tet_mesh.rest_positions + h ** 2 * g * frame * (frame + 1) / 2, atol=1e-10)
            np.testing.assert_allclose(state.v, np.tile(frame * h * g, (5, 1)), atol=1e-8)
        assert all(cache.converged for cache in caches)

    def test_gate_never_fires_on_first_iteration(self, two_tet_mesh, nh_material):
        solver = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), SolverSettings(h=0.01))
        _, caches = _run(solver, two_tet_mesh, 2)
        assert all(cache.iteration_count >= 2 for cache in caches)

    def test_dirichlet_vertices_are_exact(self, grid_mesh, grid_material):
        partition = _pinned_partition(grid_mesh, vertex=3)
        solver = ForwardSolver(grid_mesh, grid_material, partition, SolverSettings(h=0.01))

        states, _ = _run(solver, grid_mesh, 3)

        for state in states:
            np.testing.assert_array_equal(state.q[3], grid_mesh.rest_positions[3])

    def test_velocity_is_the_position_difference(self, grid_mesh, grid_material):
        solver = ForwardSolver(grid_mesh, grid_material, _pinned_partition(grid_mesh), SolverSettings(h=0.01))
        state = SimState.at_rest(grid_mesh.rest_positions)

        new_state, cache = solver.step(state, _gravity(grid_mesh))

        np.testing.assert_allclose(new_state.v * 0.01, new_state.q - state.q, rtol=1e-12, atol=1e-16)
        assert new_state.time == pytest.approx(0.01)
        np.testing.assert_array_equal(cache.q_star, new_state.q)

    def test_runs_are_deterministic(self, grid_mesh, grid_material):
        def trajectory():
            solver = ForwardSolver(grid_mesh, grid_material, _pinned_partition(grid_mesh), SolverSettings(h=0.01))
            states, _ = _run(solver, grid_mesh, 3)
            return np.stack([state.q for state in states])

        np.testing.assert_array_equal(trajectory(), trajectory())

    def test_strict_mode_raises_at_the_cap(self, two_tet_mesh, nh_material):
        settings = SolverSettings(h=0.01, max_iterations=1, strict_convergence=True)
        solver = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), settings)

        with pytest.raises(MaxIterationsError, match="no convergence after 1 iterations"):
            solver.step(SimState.at_rest(two_tet_mesh.rest_positions), _gravity(two_tet_mesh))

    def test_lenient_mode_flags_non_convergence(self, two_tet_mesh, nh_material, caplog):
        settings = SolverSettings(h=0.01, max_iterations=1)
        solver = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), settings)

        with caplog.at_level(logging.WARNING):
            _, cache = forward_step(solver, SimState.at_rest(two_tet_mesh.rest_positions), _gravity(two_tet_mesh))

        assert not cache.converged
        assert cache.iteration_count == 1
        assert "without passing the gate" in caplog.text

    def test_window_follows_heterogeneity(self, two_tet_mesh):
        partition = _pinned_partition(two_tet_mesh)
        uniform = build_material_field(two_tet_mesh, 1e4, 0.3, EnergyKind.COROTATED)
        contrasted = build_material_field(two_tet_mesh, [1e4, 1e6], 0.3, EnergyKind.COROTATED)

        assert ForwardSolver(two_tet_mesh, uniform, partition, SolverSettings()).aa_window() == 5
        assert ForwardSolver(two_tet_mesh, contrasted, partition, SolverSettings()).aa_window() == 1
        assert ForwardSolver(two_tet_mesh, contrasted, partition, SolverSettings(aa_window=3)).aa_window() == 3

    def test_material_change_triggers_one_refactorization(self, two_tet_mesh, nh_material):
        solver = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), SolverSettings(h=0.01))
        state = SimState.at_rest(two_tet_mesh.rest_positions)

        state, _ = solver.step(state, _gravity(two_tet_mesh))
        assert solver.factor_manager.refactorization_count == 1

        solver.set_material(build_material_field(two_tet_mesh, 2e4, 0.3, EnergyKind.NEO_HOOKEAN))
        state, _ = solver.step(state, _gravity(two_tet_mesh))
        state, _ = solver.step(state, _gravity(two_tet_mesh))
        assert solver.factor_manager.refactorization_count == 2

    def test_disabled_reuse_refactorizes_every_step(self, two_tet_mesh, nh_material):
        settings = SolverSettings(h=0.01, reuse_factor=False)
        solver = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), settings)
        reused = ForwardSolver(two_tet_mesh, nh_material, _pinned_partition(two_tet_mesh), SolverSettings(h=0.01))

        states, _ = _run(solver, two_tet_mesh, 4)
        reference, _ = _run(reused, two_tet_mesh, 4)

        assert solver.factor_manager.refactorization_count == 4
        assert reused.factor_manager.refactorization_count == 1
        np.testing.assert_allclose(states[-1].q, reference[-1].q, rtol=0, atol=1e-12)

    def test_cache_is_immutable_and_stable(self, grid_mesh, grid_material):
        solver = ForwardSolver(grid_mesh, grid_material, _pinned_partition(grid_mesh), SolverSettings(h=0.01))
        state = SimState.at_rest(grid_mesh.rest_positions)

        state, cache = solver.step(state, _gravity(grid_mesh))
        digest = cache.digest()
        solver.step(state, _gravity(grid_mesh), cache, frame=1)

        assert cache.digest() == digest
        assert not cache.q_star.flags.writeable
        with pytest.raises(ValueError):
            cache.q_star[0, 0] = 1.0
        assert not cache.has_contacts
        assert cache.lambda_star.size == 0

    def test_resting_body_stays_on_the_floor(self, two_tet_mesh, nh_material):
        floor = Obstacle.half_space([0.0, 0.0, 1.0], 0.0)
        partition = build_partition(two_tet_mesh.num_vertices)
        solver = ForwardSolver(two_tet_mesh, nh_material, partition, SolverSettings(h=0.01), obstacles=[floor])

        states, caches = _run(solver, two_tet_mesh, 3)

        for state, cache in zip(states, caches):
            assert cache.has_contacts
            assert state.q[:, 2].min() >= -1e-4
            assert np.all(cache.lambda_star[:cache.contact_set.num_normal] >= 0.0)
