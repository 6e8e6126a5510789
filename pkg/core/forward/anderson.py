import logging
from collections import deque
from typing import Optional, Tuple
import numpy as np

GUARD_THRESHOLD = 10.0
RELATIVE_REGULARIZATION = 1e-6
MIN_REGULARIZATION = 1e-12

class AndersonHistory:
    """
    Type-II Anderson acceleration over a bounded window of iterate and step differences.

    Each ``mix`` call records (q_k, g_k), extends the difference window and returns
    q_k + g_k - (dQ + dG) gamma, gamma = (dG^T dG + rho I)^-1 dG^T g_k. A coefficient norm
    above the guard threshold empties the window and falls back to the plain step.
    """
    def __init__(self, window: int, guard_threshold: float = GUARD_THRESHOLD):
        if window < 0:
            raise ValueError(f"Anderson window must be non-negative, got {window}.")
        self.logger = logging.getLogger(self.__class__.__name__)
        self.window = window
        self.guard_threshold = guard_threshold
        self.iterate_diffs: deque = deque(maxlen=max(window, 1))
        self.step_diffs: deque = deque(maxlen=max(window, 1))
        self.guard_trips = 0
        self.last_gamma: Optional[np.ndarray] = None
        self._previous: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def size(self) -> int:
        return len(self.step_diffs)

    def clear(self) -> None:
        self.iterate_diffs.clear()
        self.step_diffs.clear()

    def mix(self, q_prev: np.ndarray, g_k: np.ndarray) -> np.ndarray:
        shape = q_prev.shape
        q_flat = q_prev.ravel().copy()
        g_flat = g_k.ravel().copy()
        plain = q_flat + g_flat

        if self.window == 0:
            return plain.reshape(shape)

        if self._previous is not None:
            self.iterate_diffs.append(q_flat - self._previous[0])
            self.step_diffs.append(g_flat - self._previous[1])
        self._previous = (q_flat, g_flat)

        if not self.step_diffs:
            return plain.reshape(shape)

        dq = np.column_stack(self.iterate_diffs)
        dg = np.column_stack(self.step_diffs)
        columns = dg.shape[1]
        rho = max(RELATIVE_REGULARIZATION * float(np.sum(dg ** 2)) / columns, MIN_REGULARIZATION)
        gamma = np.linalg.solve(dg.T @ dg + rho * np.eye(columns), dg.T @ g_flat)
        self.last_gamma = gamma

        if np.linalg.norm(gamma) > self.guard_threshold:
            self.guard_trips += 1
            self.logger.debug(f"Anderson guard tripped (|gamma| = {np.linalg.norm(gamma):.2f}); history cleared")
            self.clear()
            return plain.reshape(shape)

        return (plain - (dq + dg) @ gamma).reshape(shape)
