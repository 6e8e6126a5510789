import os, logging
from typing import Any, Dict, List, Optional
import numpy as np
import pandas as pd
from tabulate import tabulate
from scenes.scene import Scene
from utils.results_saver import save_json_lines, save_metrics_csv, save_json_report
from .rollout import Rollout, Trajectory

logger = logging.getLogger(__name__)

def trajectory_records(trajectory: Trajectory) -> List[Dict[str, Any]]:
    """One record per simulated frame: time, q, v, iterations, converged, contact_count."""
    return [
        {
            "time": float(state.time),
            "q": state.q.tolist(),
            "v": state.v.tolist(),
            "iterations": int(cache.iteration_count),
            "converged": bool(cache.converged),
            "contact_count": int(cache.contact_set.num_normal),
        }
        for state, cache in zip(trajectory.states[1:], trajectory.caches)
    ]

def penetration(scene: Scene, q: np.ndarray) -> float:
    """Deepest penetration of any vertex into any obstacle (0 when nothing penetrates)."""
    depth = 0.0
    for obstacle in scene.obstacles:
        distances, _ = obstacle.signed_distance(q)
        depth = max(depth, float(-distances.min()))
    return depth

def frame_metrics(scene: Scene, trajectory: Trajectory) -> pd.DataFrame:
    rows = []
    for frame, (state, cache) in enumerate(zip(trajectory.states[1:], trajectory.caches)):
        rows.append({
            "frame": frame,
            "time": state.time,
            "iterations": cache.iteration_count,
            "converged": cache.converged,
            "step_residual": cache.step_residual,
            "rhs_residual": cache.rhs_residual,
            "contact_count": cache.contact_set.num_normal,
            "fb_residual": cache.contact_solution.residual if cache.has_contacts else 0.0,
            "penetration": penetration(scene, state.q),
        })
    return pd.DataFrame(rows)

def region_displacements(scene: Scene, trajectory: Trajectory) -> Dict[str, float]:
    """Largest displacement from the initial state reached by any vertex of each populated region."""
    spec = scene.material_spec
    displacement = np.linalg.norm(trajectory.positions() - trajectory.states[0].q[None], axis=2).max(axis=0)
    result = {}
    for region in spec.populated_regions():
        vertices = np.unique(scene.mesh.elements[spec.region_index == region])
        result[spec.region_names[region]] = float(displacement[vertices].max())
    return result

def run_simulate(scene: Scene, out_dir: Optional[str] = None) -> Dict[str, Any]:
    """
    Simulates every frame of the scene at its nominal material.

    Writes ``trajectory.jsonl``, ``metrics.csv`` and ``summary.json`` under ``out_dir`` when given.
    """
    rollout = Rollout(scene, scene.material())
    trajectory = rollout.run(scene.initial_state(), scene.external_forces())
    metrics = frame_metrics(scene, trajectory)

    summary = {
        "scene": scene.name,
        "frames": scene.frames,
        "iterations": metrics["iterations"].tolist(),
        "converged": metrics["converged"].tolist(),
        "all_converged": bool(metrics["converged"].all()),
        "refactorization_count": rollout.refactorization_count,
        "max_penetration": float(metrics["penetration"].max()),
        "region_displacements": region_displacements(scene, trajectory),
    }

    logger.info("\n" + tabulate(
        [["frames", scene.frames], ["converged", f"{int(metrics['converged'].sum())}/{scene.frames}"],
         ["mean iterations", f"{metrics['iterations'].mean():.1f}"], ["max iterations", int(metrics['iterations'].max())],
         ["refactorizations", rollout.refactorization_count], ["max penetration (m)", f"{summary['max_penetration']:.3e}"]],
        headers=["simulate", scene.name], tablefmt="github"))

    if out_dir:
        save_json_lines(trajectory_records(trajectory), os.path.join(out_dir, "trajectory.jsonl"))
        save_metrics_csv(metrics, os.path.join(out_dir, "metrics.csv"))
        save_json_report(summary, os.path.join(out_dir, "summary.json"))
    return summary
