import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Deque, Dict, List, Tuple
import numpy as np
from .exceptions import OptimizerStalledError

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]

@dataclass(frozen=True)
class LBFGSSettings:
    memory: int = 10
    max_evals: int = 100
    gtol: float = 1e-6
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 20
    initial_step: float = 1.0

    def __post_init__(self):
        if self.memory < 1 or self.max_evals < 1:
            raise ValueError("memory and max_evals must be positive.")
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError(f"Wolfe constants must satisfy 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}.")

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "LBFGSSettings":
        known = {"memory", "max_evals", "gtol", "c1", "c2", "max_line_search", "initial_step"}
        return cls(**{key: value for key, value in (values or {}).items() if key in known})

@dataclass
class OptimizationResult:
    x: np.ndarray
    loss: float
    gradient_norm: float
    evaluations: int
    iterations: int
    status: str
    history: List[Dict[str, float]] = field(default_factory=list)

class _Budget(Exception):
    pass

class LBFGSOptimizer:
    """
    Limited-memory BFGS with the two-loop recursion and a strong-Wolfe line search
    (bracketing, then zoom by bisection).

    Converges when |g| <= gtol |g_0|. Running out of evaluations, or a line search that
    finds no acceptable step, raises OptimizerStalledError carrying the best point so far.
    """
    def __init__(self, settings: LBFGSSettings):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.settings = settings

    def minimize(self, objective: Objective, x0: np.ndarray) -> OptimizationResult:
        settings = self.settings
        history: List[Dict[str, float]] = []
        best = {"x": np.array(x0, dtype=float), "loss": np.inf, "gradient": None}
        memory: Deque[Tuple[np.ndarray, np.ndarray, float]] = deque(maxlen=settings.memory)

        def evaluate(x: np.ndarray, step: float) -> Tuple[float, np.ndarray]:
            if len(history) >= settings.max_evals:
                raise _Budget()
            loss, gradient = objective(x)
            loss = float(loss) if np.isfinite(loss) else np.inf
            if loss < best["loss"] and np.all(np.isfinite(gradient)):
                best.update(x=x.copy(), loss=loss, gradient=gradient.copy())
            history.append({"evaluation": len(history) + 1, "loss": loss, "best_loss": best["loss"],
                            "gradient_norm": float(np.linalg.norm(gradient)) if np.all(np.isfinite(gradient)) else np.inf,
                            "step": float(step)})
            self.logger.info(f"Evaluation {len(history)}: loss {loss:.6e} (best {best['loss']:.6e})")
            return loss, gradient

        def stalled(reason: str, iterations: int):
            gradient = best["gradient"]
            norm = float(np.linalg.norm(gradient)) if gradient is not None else np.inf
            result = OptimizationResult(best["x"], best["loss"], norm, len(history), iterations, "stalled", history)
            return OptimizerStalledError(len(history), best["loss"], reason, result)

        x = best["x"]
        iteration = 0
        try:
            loss, gradient = evaluate(x, 0.0)
        except _Budget:
            raise stalled("evaluation budget exhausted", 0)
        if not (np.isfinite(loss) and np.all(np.isfinite(gradient))):
            raise stalled("objective is not finite at the starting point", 0)
        threshold = settings.gtol * max(float(np.linalg.norm(gradient)), np.finfo(float).tiny)

        while True:
            norm = float(np.linalg.norm(gradient))
            if norm <= threshold:
                self.logger.info(f"L-BFGS converged after {iteration} iterations, {len(history)} evaluations")
                return OptimizationResult(x, loss, norm, len(history), iteration, "converged", history)

            direction = self._direction(gradient, memory)
            if np.dot(direction, gradient) >= 0:
                memory.clear()
                direction = self._direction(gradient, memory)

            try:
                step, new_loss, new_gradient = self._line_search(evaluate, x, loss, gradient, direction)
            except _Budget:
                raise stalled("evaluation budget exhausted", iteration)
            if step is None:
                raise stalled("line search found no acceptable step", iteration)

            s = step * direction
            y = new_gradient - gradient
            curvature = float(np.dot(s, y))
            if curvature > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
                memory.append((s, y, 1.0 / curvature))
            x, loss, gradient = x + s, new_loss, new_gradient
            iteration += 1

    def _direction(self, gradient: np.ndarray, memory) -> np.ndarray:
        if not memory:
            return -gradient * (self.settings.initial_step / np.max(np.abs(gradient)))

        q = gradient.copy()
        alphas = []
        for s, y, rho in reversed(memory):
            alpha = rho * np.dot(s, q)
            q -= alpha * y
            alphas.append(alpha)

        s, y, _ = memory[-1]
        r = q * (np.dot(s, y) / np.dot(y, y))
        for (s, y, rho), alpha in zip(memory, reversed(alphas)):
            beta = rho * np.dot(y, r)
            r += s * (alpha - beta)
        return -r

    def _line_search(self, evaluate, x: np.ndarray, loss: float, gradient: np.ndarray, direction: np.ndarray):
        """Strong-Wolfe step along ``direction``; returns (None, ...) when nothing acceptable is found."""
        c1, c2 = self.settings.c1, self.settings.c2
        slope0 = float(np.dot(gradient, direction))
        previous_step, previous_loss = 0.0, loss
        step = 1.0
        armijo_point = None

        def sufficient(trial_step: float, trial_loss: float) -> bool:
            return trial_loss <= loss + c1 * trial_step * slope0

        for attempt in range(self.settings.max_line_search):
            trial_loss, trial_gradient = evaluate(x + step * direction, step)
            if not np.all(np.isfinite(trial_gradient)):
                trial_loss = np.inf
            slope = float(np.dot(trial_gradient, direction)) if np.isfinite(trial_loss) else np.inf

            if not sufficient(step, trial_loss) or (attempt > 0 and trial_loss >= previous_loss):
                return self._zoom(evaluate, x, loss, slope0, direction, previous_step, previous_loss, step, armijo_point)
            armijo_point = (step, trial_loss, trial_gradient)
            if abs(slope) <= -c2 * slope0:
                return step, trial_loss, trial_gradient
            if slope >= 0:
                return self._zoom(evaluate, x, loss, slope0, direction, step, trial_loss, previous_step, armijo_point)
            previous_step, previous_loss = step, trial_loss
            step *= 2.0

        return armijo_point if armijo_point is not None else (None, None, None)

    def _zoom(self, evaluate, x, loss, slope0, direction, low, low_loss, high, armijo_point):
        c1, c2 = self.settings.c1, self.settings.c2
        for _ in range(self.settings.max_line_search):
            step = 0.5 * (low + high)
            trial_loss, trial_gradient = evaluate(x + step * direction, step)
            if not np.all(np.isfinite(trial_gradient)):
                trial_loss = np.inf

            if trial_loss > loss + c1 * step * slope0 or trial_loss >= low_loss:
                high = step
                continue
            slope = float(np.dot(trial_gradient, direction))
            armijo_point = (step, trial_loss, trial_gradient)
            if abs(slope) <= -c2 * slope0:
                return step, trial_loss, trial_gradient
            if slope * (high - low) >= 0:
                high = low
            low, low_loss = step, trial_loss

        return armijo_point if armijo_point is not None else (None, None, None)
