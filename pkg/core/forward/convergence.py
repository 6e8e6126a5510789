from typing import Tuple
import numpy as np

def gate_residuals(q_k: np.ndarray, q_k1: np.ndarray, b_k: np.ndarray, b_k1: np.ndarray) -> Tuple[float, float]:
    return float(np.linalg.norm(q_k1 - q_k)), float(np.linalg.norm(b_k1 - b_k))

def dual_gate(q_k: np.ndarray, q_k1: np.ndarray, b_k: np.ndarray, b_k1: np.ndarray,
              eps_rel: float, eps_abs: float, k: int) -> bool:
    """
    Converged iff k >= 1 and both the iterate step and the right-hand-side change are small.

    ||q_k1 - q_k|| <= eps_rel ||q_k|| + eps_abs and ||b_k1 - b_k|| <= eps_rel ||b_k|| + eps_abs.
    """
    if k < 1:
        return False
    step, rhs = gate_residuals(q_k, q_k1, b_k, b_k1)
    return bool(step <= eps_rel * np.linalg.norm(q_k) + eps_abs and rhs <= eps_rel * np.linalg.norm(b_k) + eps_abs)
