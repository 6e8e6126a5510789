from dataclasses import dataclass
import numpy as np
from core.material.neo_hookean import nh_stretch_hessian

ALLOWED_TAUS = (0.0, 0.5, 1.0)

@dataclass(frozen=True)
class ProxHessian:
    """Stretch-space prox-map Hessian H = H_phi + k I and its trust-region blend (1 - tau) H + tau |H|."""
    h_prox: np.ndarray
    tau: float
    h_filtered: np.ndarray

def prox_hessian(sigma_star: np.ndarray, mean_mu: float, mean_lam: float, mean_k: float) -> ProxHessian:
    sigma_star = np.asarray(sigma_star, dtype=float)
    if np.any(sigma_star <= 0):
        raise ValueError("Prox-map Hessian needs strictly positive stretches.")
    h_prox = nh_stretch_hessian(sigma_star, mean_mu, mean_lam) + mean_k * np.eye(3)
    return ProxHessian(h_prox=h_prox, tau=0.0, h_filtered=h_prox)

def penalized_hessian(stretch_hessian: np.ndarray, penalty: float) -> ProxHessian:
    """Same construction for any stretch energy whose Hessian is already evaluated."""
    h_prox = stretch_hessian + penalty * np.eye(3)
    return ProxHessian(h_prox=h_prox, tau=0.0, h_filtered=h_prox)

def absolute_value(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh(matrix)
    return np.einsum('...ik,...k,...jk->...ij', vectors, np.abs(eigenvalues), vectors)

def tr_blend(h_prox: np.ndarray, tau: float) -> ProxHessian:
    """
    Trust-region blend of a symmetric stretch Hessian.

    tau = 0 keeps H, tau = 1/2 clamps negative eigenvalues to zero, tau = 1 flips them.
    """
    tau = float(tau)
    if tau not in ALLOWED_TAUS:
        raise ValueError(f"Invalid blend parameter: {tau}. Available values are: {', '.join(map(str, ALLOWED_TAUS))}")

    h_prox = np.asarray(h_prox, dtype=float)
    if tau == 0.0:
        return ProxHessian(h_prox=h_prox, tau=tau, h_filtered=h_prox)

    h_filtered = (1.0 - tau) * h_prox + tau * absolute_value(h_prox)
    h_filtered = 0.5 * (h_filtered + np.swapaxes(h_filtered, -1, -2))
    return ProxHessian(h_prox=h_prox, tau=tau, h_filtered=h_filtered)
