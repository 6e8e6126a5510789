import logging
from typing import Callable, Union
import numpy as np

logger = logging.getLogger(__name__)

def fd_steps(params: np.ndarray, relative: float, floor: float) -> np.ndarray:
    """Per-parameter step max(relative |p|, floor)."""
    return np.maximum(relative * np.abs(np.asarray(params, dtype=float)), floor)

def fd_gradient(loss_closure: Callable[[np.ndarray], float], params: np.ndarray,
                steps: Union[float, np.ndarray]) -> np.ndarray:
    """
    Central-difference gradient of a deterministic scalar closure.

    Args:
        loss_closure: Maps a flat parameter vector to a float.
        params: Point to differentiate at; not modified.
        steps: Scalar, or step sizes broadcastable to the shape of ``params``.

    Returns:
        np.ndarray: Gradient with the shape of ``params``.
    """
    params = np.asarray(params, dtype=float)
    flat = params.ravel()
    steps = np.broadcast_to(np.asarray(steps, dtype=float), params.shape).ravel()
    gradient = np.empty_like(flat)

    for index in range(flat.size):
        forward = flat.copy()
        backward = flat.copy()
        forward[index] += steps[index]
        backward[index] -= steps[index]
        gradient[index] = (loss_closure(forward.reshape(params.shape))
                           - loss_closure(backward.reshape(params.shape))) / (2.0 * steps[index])

    logger.debug(f"Finite differences over {flat.size} parameters done")
    return gradient.reshape(params.shape)
