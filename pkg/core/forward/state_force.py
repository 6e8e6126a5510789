from typing import Sequence
import numpy as np

class StateForce:
    """
    State-dependent force hook f_state(q, v) and its transposed Jacobian applies.

    The base hook returns zero force.
    """
    def force(self, q: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.zeros_like(q)

    def jacobian_q_transpose(self, q: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.zeros_like(q)

    def jacobian_v_transpose(self, q: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.zeros_like(q)

class AnchorSpringForce(StateForce):
    """Damped zero-length springs pulling selected vertices toward fixed anchors: f = -k (q - a) - c v."""
    def __init__(self, vertices: Sequence[int], anchors: np.ndarray, stiffness: float, damping: float = 0.0):
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.anchors = np.asarray(anchors, dtype=float).reshape(-1, 3)
        self.stiffness = float(stiffness)
        self.damping = float(damping)

    def force(self, q: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(q)
        out[self.vertices] = -self.stiffness * (q[self.vertices] - self.anchors) - self.damping * v[self.vertices]
        return out

    def jacobian_q_transpose(self, q: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        out = np.zeros_like(q)
        out[self.vertices] = -self.stiffness * w[self.vertices]
        return out

    def jacobian_v_transpose(self, q: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        out = np.zeros_like(q)
        out[self.vertices] = -self.damping * w[self.vertices]
        return out
