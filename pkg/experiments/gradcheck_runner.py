import logging
from typing import Any, Callable, Dict, List, Optional, Sequence
import numpy as np
from tabulate import tabulate
from config.design_variable_kind import GradcheckVariable
from core.forward.sim_state import SimState
from core.oracle.finite_difference import fd_gradient, fd_steps
from scenes.scene import Scene
from utils.constants import (GRADCHECK_SOLVER_SETTINGS, FD_RELATIVE_STEP, FD_ABSOLUTE_FLOOR,
                             GRADCHECK_TOLERANCE, GRADCHECK_SCALE_FLOOR)
from utils.results_saver import save_json_report
from .losses import RandomLinearLoss
from .rollout import Rollout, RolloutGradient

logger = logging.getLogger(__name__)

def relative_errors(adjoint: np.ndarray, reference: np.ndarray, scale_floor: float = GRADCHECK_SCALE_FLOOR) -> np.ndarray:
    """
    |g - g_fd| / max(|g_fd|, floor * |g_fd|_inf), entrywise; zero where both vanish.

    An all-zero reference falls back to the adjoint's own scale.
    """
    adjoint = np.asarray(adjoint, dtype=float).ravel()
    reference = np.asarray(reference, dtype=float).ravel()
    scale = float(np.max(np.abs(reference), initial=0.0)) or float(np.max(np.abs(adjoint), initial=0.0))
    denominator = np.maximum(np.abs(reference), scale_floor * scale)
    difference = np.abs(adjoint - reference)
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(denominator > 0, difference / np.where(denominator > 0, denominator, 1.0), 0.0)

class GradientCheck:
    """
    Compares rollout gradients of a random linear loss with central differences.

    Material perturbations keep the mesh means of the nominal material fixed.
    """
    def __init__(self, scene: Scene, seed: int = 0):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.scene = scene.with_settings(**GRADCHECK_SOLVER_SETTINGS)
        nominal = self.scene.material()
        self.means = (nominal.mean_mu, nominal.mean_lam)
        self.material = self.scene.material(frozen_means=self.means)
        self.rollout = Rollout(self.scene, self.material)
        self.state = self.scene.initial_state()
        self.forces = self.scene.external_forces()
        self.loss = RandomLinearLoss(self.scene.frames + 1, self.scene.num_vertices, seed)
        self.free = self.scene.partition.free

    def _loss(self, rollout: Rollout, state: SimState, forces: np.ndarray) -> float:
        value, _ = self.loss.evaluate(rollout.run(state, forces))
        return value

    def adjoint(self) -> RolloutGradient:
        trajectory = self.rollout.run(self.state, self.forces)
        _, seeds = self.loss.evaluate(trajectory)
        return self.rollout.gradients(trajectory, seeds)

    def closure(self, variable: GradcheckVariable) -> Callable[[np.ndarray], float]:
        state, forces, free = self.state, self.forces, self.free

        if variable == GradcheckVariable.POSITION:
            def position_loss(params):
                q = state.q.copy()
                q[free] = params
                return self._loss(self.rollout, SimState(q=q, v=state.v), forces)
            return position_loss

        if variable == GradcheckVariable.VELOCITY:
            def velocity_loss(params):
                v = state.v.copy()
                v[free] = params
                return self._loss(self.rollout, SimState(q=state.q, v=v), forces)
            return velocity_loss

        if variable == GradcheckVariable.FORCE:
            def force_loss(params):
                perturbed = forces.copy()
                perturbed[:, free] = params
                return self._loss(self.rollout, state, perturbed)
            return force_loss

        if variable == GradcheckVariable.WEIGHT:
            return lambda params: self._loss(Rollout(self.scene, self.material.with_weights(params)), state, forces)

        return lambda params: self._loss(Rollout(self.scene, self.scene.element_material(params, self.means)), state, forces)

    def parameters(self, variable: GradcheckVariable) -> np.ndarray:
        return {
            GradcheckVariable.POSITION: lambda: self.state.q[self.free],
            GradcheckVariable.VELOCITY: lambda: self.state.v[self.free],
            GradcheckVariable.FORCE: lambda: self.forces[:, self.free],
            GradcheckVariable.WEIGHT: lambda: np.asarray(self.material.pd_weight),
            GradcheckVariable.YOUNG: lambda: np.asarray(self.material.young),
        }[variable]().copy()

    def adjoint_entries(self, variable: GradcheckVariable, gradient: RolloutGradient) -> np.ndarray:
        return {
            GradcheckVariable.POSITION: lambda: gradient.dL_dq0[self.free],
            GradcheckVariable.VELOCITY: lambda: gradient.dL_dv0[self.free],
            GradcheckVariable.FORCE: lambda: gradient.dL_df_ext[:, self.free],
            GradcheckVariable.WEIGHT: lambda: gradient.dL_dw,
            GradcheckVariable.YOUNG: lambda: gradient.dL_dE,
        }[variable]()

    def run(self, variables: Sequence[GradcheckVariable], tolerance: float = GRADCHECK_TOLERANCE) -> Dict[str, Any]:
        gradient = self.adjoint()
        results: Dict[str, Any] = {}

        for variable in variables:
            name = variable.value
            params = self.parameters(variable)
            steps = fd_steps(params, FD_RELATIVE_STEP[name], FD_ABSOLUTE_FLOOR[name])
            reference = fd_gradient(self.closure(variable), params, steps)
            errors = relative_errors(self.adjoint_entries(variable, gradient), reference)
            max_error = float(errors.max(initial=0.0))
            results[name] = {
                "max_rel_error": max_error,
                "num_entries": int(errors.size),
                "passed": max_error <= tolerance,
                "adjoint_norm": float(np.linalg.norm(self.adjoint_entries(variable, gradient))),
                "fd_norm": float(np.linalg.norm(reference)),
            }
            level = logging.INFO if max_error <= tolerance else logging.WARNING
            self.logger.log(level, f"Gradient check '{name}': max relative error {max_error:.3e} over {errors.size} entries")

        frames = [
            {"frame": frame, "tau": tau, "rho": rho, "adjoint_iterations": iterations}
            for frame, (tau, rho, iterations) in enumerate(zip(gradient.taus, gradient.ratios, gradient.adjoint_iterations))
        ]
        return {
            "scene": self.scene.name,
            "frames": self.scene.frames,
            "tolerance": tolerance,
            "variables": results,
            "per_frame": frames,
            "passed": all(entry["passed"] for entry in results.values()),
        }

def run_gradcheck(scene: Scene, variables: Sequence[GradcheckVariable], out_path: Optional[str] = None,
                  seed: int = 0, tolerance: float = GRADCHECK_TOLERANCE) -> Dict[str, Any]:
    """
    Checks the requested gradients on ``scene`` and writes the report to ``out_path``.

    The caller decides the exit status from ``report["passed"]``.
    """
    report = GradientCheck(scene, seed).run(variables, tolerance)
    rows: List[List[Any]] = [[name, entry["num_entries"], f"{entry['max_rel_error']:.3e}", "ok" if entry["passed"] else "FAIL"]
                             for name, entry in report["variables"].items()]
    logger.info("\n" + tabulate(rows, headers=["variable", "entries", "max rel err", "status"], tablefmt="github"))
    if out_path:
        save_json_report(report, out_path)
    return report
