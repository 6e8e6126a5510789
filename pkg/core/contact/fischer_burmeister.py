from typing import Tuple
import numpy as np

ORIGIN_TOLERANCE = 1e-300

def fb_residual(delta, r, lam):
    """phi = delta + r lambda - sqrt(delta^2 + r^2 lambda^2); zero exactly on delta >= 0, lambda >= 0, delta lambda = 0."""
    delta = np.asarray(delta, dtype=float)
    scaled = np.asarray(r, dtype=float) * np.asarray(lam, dtype=float)
    value = delta + scaled - np.hypot(delta, scaled)
    return float(value) if np.ndim(value) == 0 else value

def ncp_weights(delta, r, lam) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weights (omega, E) with omega delta + E lambda = phi.

    omega = 1 - delta / rho and E = (1 - r lambda / rho) r with rho = sqrt(delta^2 + r^2 lambda^2);
    at the origin the active-branch limit (1, r) is used.
    """
    delta = np.asarray(delta, dtype=float)
    r = np.asarray(r, dtype=float)
    scaled = r * np.asarray(lam, dtype=float)
    rho = np.hypot(delta, scaled)
    origin = rho <= ORIGIN_TOLERANCE
    safe = np.where(origin, 1.0, rho)

    omega = np.where(origin, 1.0, 1.0 - delta / safe)
    regularizer = np.where(origin, r, (1.0 - scaled / safe) * r)
    return omega, regularizer

def project_cone(normal: np.ndarray, tangential: np.ndarray, friction: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Projects multipliers onto the admissible set.

    Normals are clamped to be non-negative; each friction pair is scaled radially onto
    ||lambda_f|| <= mu lambda_n.

    Args:
        normal: (n,) normal multipliers of the contacts carrying friction pairs.
        tangential: (n, 2) friction pairs.
        friction: (n,) coefficients mu.
    """
    normal = np.maximum(normal, 0.0)
    radius = friction * normal
    length = np.linalg.norm(tangential, axis=-1)
    outside = length > radius
    scale = np.where(outside, radius / np.where(outside, length, 1.0), 1.0)
    return normal, tangential * scale[:, None]
