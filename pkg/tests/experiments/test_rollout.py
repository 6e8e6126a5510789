import pytest
import numpy as np
from core.forward.exceptions import MaxIterationsError
from experiments.rollout import Rollout, StateSeeds, simulate
from scenes.scene_builder import load_scene
from utils.constants import GRADCHECK_SOLVER_SETTINGS

FRAMES = 3

@pytest.fixture
def free_scene():
    scene = load_scene({"generator": "two-tet", "params": {"pinned": []}, "frames": FRAMES})
    return scene.with_settings(**GRADCHECK_SOLVER_SETTINGS)

class TestRollout:
    def test_run_records_every_frame(self, free_scene):
        rollout = Rollout(free_scene, free_scene.material())
        trajectory = rollout.run(free_scene.initial_state(), free_scene.external_forces())

        assert trajectory.num_frames == FRAMES
        assert trajectory.positions().shape == (FRAMES + 1, 5, 3)
        assert [cache.frame for cache in trajectory.caches] == [0, 1, 2]
        assert rollout.refactorization_count == 1

    def test_free_fall_gradients_are_analytic(self, free_scene):
        rollout = Rollout(free_scene, free_scene.material())
        trajectory = rollout.run(free_scene.initial_state(), free_scene.external_forces())
        mass = free_scene.mesh.vertex_mass[:, None]
        direction = np.array([0.3, -1.0, 0.5])
        h = free_scene.settings.h

        seeds = StateSeeds.zeros(FRAMES + 1, 5)
        seeds.dq[FRAMES] = mass * direction
        gradient = rollout.gradients(trajectory, seeds)

        np.testing.assert_allclose(gradient.dL_dq0, mass * direction, rtol=1e-6)
        np.testing.assert_allclose(gradient.dL_dv0, FRAMES * h * mass * direction, rtol=1e-6)
        for frame in range(FRAMES):
            np.testing.assert_allclose(gradient.dL_df_ext[frame], np.tile((FRAMES - frame) * h ** 2 * direction, (5, 1)),
                                       rtol=1e-6)
        assert len(gradient.taus) == FRAMES

    def test_zero_seeds(self, free_scene):
        rollout = Rollout(free_scene, free_scene.material())
        trajectory = rollout.run(free_scene.initial_state(), free_scene.external_forces())
        gradient = rollout.gradients(trajectory, StateSeeds.zeros(FRAMES + 1, 5))
        assert not np.any(gradient.dL_dv0)
        assert not np.any(gradient.dL_dE)

    def test_strict_failure_names_the_frame(self, caplog):
        scene = load_scene({"generator": "two-tet", "frames": 2}).with_settings(strict_convergence=True, max_iterations=1)
        with pytest.raises(MaxIterationsError, match="Frame 0"):
            simulate(scene)
        assert "Forward step failed at frame 0" in caplog.text

    def test_material_change_refactorizes(self, free_scene):
        rollout = Rollout(free_scene, free_scene.material())
        rollout.run(free_scene.initial_state(), free_scene.external_forces())
        rollout.set_material(free_scene.material([2e4]))
        rollout.run(free_scene.initial_state(), free_scene.external_forces())
        assert rollout.refactorization_count == 2
