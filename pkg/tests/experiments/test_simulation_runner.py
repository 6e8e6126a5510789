import json
import pytest
import numpy as np
import pandas as pd
from experiments.rollout import Rollout
from experiments.simulation_runner import frame_metrics, run_simulate, penetration
from scenes.scene_builder import load_scene

class TestSimulationRunner:
    def test_writes_trajectory_metrics_and_summary(self, tmp_path):
        summary = run_simulate(load_scene("two-tet"), str(tmp_path))

        assert summary["frames"] == 3
        assert summary["all_converged"]
        assert summary["refactorization_count"] == 1
        assert summary["max_penetration"] == 0.0
        assert set(summary["region_displacements"]) == {"base"}

        records = [json.loads(line) for line in (tmp_path / "trajectory.jsonl").read_text(encoding='utf-8').splitlines()]
        assert len(records) == 3
        assert set(records[0]) == {"time", "q", "v", "iterations", "converged", "contact_count"}
        assert records[0]["q"][0] == [0.0, 0.0, 0.0]
        assert len(pd.read_csv(tmp_path / "metrics.csv")) == 3
        assert json.loads((tmp_path / "summary.json").read_text(encoding='utf-8'))["scene"] == "two-tet"

    def test_without_output_directory(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        run_simulate(load_scene({"generator": "two-tet", "frames": 1}))
        assert list(tmp_path.iterdir()) == []

    def test_penetration(self):
        scene = load_scene({"generator": "two-tet", "params": {"floor": True}})
        q = scene.mesh.rest_positions.copy()
        assert penetration(scene, q) == 0.0
        q[2, 2] = -0.01
        assert np.isclose(penetration(scene, q), 0.01)

    def test_neo_hookean_two_tet_runs_every_frame(self):
        summary = run_simulate(load_scene({"generator": "two-tet", "frames": 10}))
        assert summary["frames"] == 10
        assert summary["all_converged"]

    @pytest.mark.slow
    def test_neo_hookean_cantilever_runs_every_frame(self):
        summary = run_simulate(load_scene({"generator": "cantilever3", "params": {"frames": 5}}))
        assert summary["all_converged"]
        assert summary["refactorization_count"] == 1

@pytest.mark.slow
class TestHeterogeneitySweep:
    def test_twist_bar_stays_convergent_up_to_hundredfold_contrast(self):
        iterations = {}
        for contrast in (10.0, 50.0, 100.0):
            summary = run_simulate(load_scene({"generator": "twist-bar", "params": {"contrast": contrast, "frames": 5}}))
            assert summary["all_converged"], contrast
            iterations[contrast] = sum(summary["iterations"])

        assert iterations[100.0] < 5 * iterations[10.0]

@pytest.mark.slow
class TestContactScenes:
    def _rollout(self, config):
        scene = load_scene(config)
        trajectory = Rollout(scene, scene.material()).run(scene.initial_state(), scene.external_forces())
        return scene, trajectory

    @pytest.mark.parametrize("config", [
        {"generator": "resting-box"},
        {"generator": "ball-drop", "params": {"friction": 0.3, "frames": 20}},
    ], ids=["resting-box", "ball-drop"])
    def test_converged_frames_satisfy_contact_conditions(self, config):
        scene, trajectory = self._rollout(config)
        metrics = frame_metrics(scene, trajectory)
        converged = metrics[metrics["converged"]]

        assert (converged["contact_count"] > 0).any()
        assert converged["fb_residual"].max() <= 1e-6
        assert converged["penetration"].max() <= 1e-4

        for cache in trajectory.caches:
            contacts = cache.contact_set
            if not cache.converged or not contacts.num_friction:
                continue
            multipliers = cache.lambda_star
            tangential = np.linalg.norm(multipliers[contacts.friction_slice()].reshape(-1, 2), axis=1)
            bound = contacts.friction[contacts.frictional] * multipliers[contacts.normal_slice()][contacts.frictional]
            assert np.all(tangential <= bound + 1e-10)
