import os, logging
from typing import Any, Dict, Optional, Tuple
import numpy as np
import pandas as pd
from tabulate import tabulate
from core.material.exceptions import NonPositiveJacobianError
from core.factor.exceptions import NotPositiveDefiniteError
from core.localstep.exceptions import ProxDivergedError, SingularFilteredHessianError
from core.forward.exceptions import MaxIterationsError
from core.contact.exceptions import SingularContactSystemError
from core.backward.exceptions import AdjointDivergedError
from scenes.inverse_problem import InverseProblem
from utils.results_saver import save_json_report, save_metrics_csv
from .design_variables import DesignSpace
from .losses import Loss, build_loss
from .rollout import Rollout
from .lbfgs_optimizer import LBFGSOptimizer, LBFGSSettings, OptimizationResult
from .exceptions import OptimizerStalledError

SOLVER_FAILURES = (NonPositiveJacobianError, NotPositiveDefiniteError, ProxDivergedError, SingularFilteredHessianError,
                   MaxIterationsError, SingularContactSystemError, AdjointDivergedError)

class Identification:
    """
    Fits design variables to a loss with L-BFGS, one forward and one reverse rollout per evaluation.

    A single rollout is reused across evaluations, so the factor is rebuilt only when the
    material changes; ``material_updates`` counts those changes for cross-checking.
    """
    def __init__(self, problem: InverseProblem):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.problem = problem
        scene = problem.scene
        self.space = DesignSpace(scene, problem.variables)
        self.x0 = self.space.initial_vector(problem.initial)

        start = self.space.material(self.space.decode(self.x0))
        self.space.frozen_means = (start.mean_mu, start.mean_lam)
        self.rollout = Rollout(scene, self.space.material(self.space.decode(self.x0)))
        self.material_updates = 0
        self._material_version: Optional[str] = None

        rest = scene.mesh.rest_positions
        self.length_scale = float(np.linalg.norm(rest.max(axis=0) - rest.min(axis=0)))
        self.reference_positions = self._synthesize_reference() if problem.reference else None
        self.loss: Loss = build_loss(problem.loss, scene.mesh, self.reference_positions, self.length_scale)

    def _synthesize_reference(self) -> np.ndarray:
        """Reference trajectory from the hidden design values, simulated at their own material means."""
        hidden = self.space.decode(self.space.initial_vector(self.problem.reference))
        reference_space = DesignSpace(self.problem.scene, self.problem.variables)
        rollout = Rollout(self.problem.scene, reference_space.material(hidden))
        trajectory = rollout.run(reference_space.initial_state(hidden), reference_space.forces(hidden))
        self.logger.info(f"Synthetic reference generated from {self.problem.reference}")
        return trajectory.positions()

    def objective(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        point = self.space.decode(x)
        try:
            material = self.space.material(point)
            if material.version != self._material_version:
                self.material_updates += 1
                self._material_version = material.version
            self.rollout.set_material(material)
            trajectory = self.rollout.run(self.space.initial_state(point), self.space.forces(point))
            value, seeds = self.loss.evaluate(trajectory)
            gradient = self.space.chain(point, self.rollout.gradients(trajectory, seeds))
        except SOLVER_FAILURES as e:
            self.logger.warning(f"Evaluation failed at {self.space.describe(x)}: {e}")
            return np.inf, np.full(x.shape, np.nan)
        return value, gradient

    def run(self) -> Tuple[OptimizationResult, Optional[OptimizerStalledError]]:
        optimizer = LBFGSOptimizer(LBFGSSettings.from_dict(self.problem.optimizer))
        try:
            return optimizer.minimize(self.objective, self.x0), None
        except OptimizerStalledError as e:
            self.logger.warning(str(e))
            return e.result, e

def run_identify(problem: InverseProblem, out_dir: Optional[str] = None) -> Dict[str, Any]:
    """
    Solves the inverse problem and emits the loss curve and recovered parameters.

    Writes ``result.json`` and ``loss_curve.csv`` under ``out_dir`` when given.
    """
    identification = Identification(problem)
    result, stall = identification.run()
    space = identification.space

    summary = {
        "problem": problem.name,
        "scene": problem.scene.name,
        "status": result.status,
        "stall_reason": stall.reason if stall is not None else None,
        "evaluations": result.evaluations,
        "iterations": result.iterations,
        "loss": result.loss,
        "gradient_norm": result.gradient_norm,
        "initial": space.describe(identification.x0),
        "recovered": space.describe(result.x),
        "reference": problem.reference,
        "synthetic_reference": bool(problem.reference),
        "refactorizations": identification.rollout.refactorization_count,
        "material_updates": identification.material_updates,
        "loss_curve": result.history,
    }

    logging.getLogger(__name__).info("\n" + tabulate(
        [["status", result.status], ["evaluations", result.evaluations], ["loss", f"{result.loss:.6e}"],
         ["recovered", summary["recovered"]], ["refactorizations", summary["refactorizations"]]],
        headers=["identify", problem.name], tablefmt="github"))

    if out_dir:
        save_json_report(summary, os.path.join(out_dir, "result.json"))
        save_metrics_csv(pd.DataFrame(result.history), os.path.join(out_dir, "loss_curve.csv"))
    return summary
