from typing import Union
import numpy as np
from .exceptions import NonPositiveJacobianError

ArrayLike = Union[float, np.ndarray]

def _checked_jacobian(F: np.ndarray) -> np.ndarray:
    J = np.linalg.det(F)
    if np.any(J <= 0):
        flat = np.atleast_1d(J)
        worst = int(np.argmin(flat))
        raise NonPositiveJacobianError(float(flat[worst]), worst if flat.size > 1 else -1)
    return J

def nh_energy(F: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> Union[float, np.ndarray]:
    """Compressible Neo-Hookean energy density psi(F); F may be (3, 3) or (n, 3, 3)."""
    F = np.asarray(F, dtype=float)
    log_j = np.log(_checked_jacobian(F))
    frob = np.einsum('...ij,...ij->...', F, F)
    psi = 0.5 * mu * (frob - 3.0) - mu * log_j + 0.5 * lam * log_j ** 2
    return float(psi) if np.ndim(psi) == 0 else psi

def nh_pk1(F: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """First Piola-Kirchhoff stress P = mu (F - F^-T) + lambda ln(J) F^-T."""
    F = np.asarray(F, dtype=float)
    log_j = np.log(_checked_jacobian(F))
    f_inv_t = np.swapaxes(np.linalg.inv(F), -1, -2)
    mu = np.asarray(mu, dtype=float)[..., None, None]
    lam = np.asarray(lam, dtype=float)[..., None, None]
    return mu * (F - f_inv_t) + lam * np.asarray(log_j)[..., None, None] * f_inv_t

def nh_stress_differential(F: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """
    dP/dF as a 9x9 matrix acting on row-major vec(dF).

    dP = mu dF + (mu - lambda ln J) F^-T dF^T F^-T + lambda tr(F^-1 dF) F^-T

    Returns:
        np.ndarray: (..., 9, 9).
    """
    F = np.asarray(F, dtype=float)
    log_j = np.log(_checked_jacobian(F))
    f_inv = np.linalg.inv(F)
    f_inv_t = np.swapaxes(f_inv, -1, -2)
    lead = F.shape[:-2]

    mu = np.broadcast_to(np.asarray(mu, dtype=float), lead)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), lead)
    twist = (mu - lam * log_j)[..., None, None, None, None]

    eye = np.eye(3)
    tensor = mu[..., None, None, None, None] * np.einsum('ik,jl->ijkl', eye, eye)
    tensor = tensor + twist * np.einsum('...ki,...jl->...ijlk', f_inv, f_inv)
    tensor = tensor + lam[..., None, None, None, None] * np.einsum('...ij,...kl->...ijlk', f_inv_t, f_inv)
    return tensor.reshape(lead + (9, 9))

def nh_stretch_energy(sigma: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """psi restricted to principal stretches; sigma has shape (..., 3) with positive entries."""
    sigma = np.asarray(sigma, dtype=float)
    log_sum = np.log(sigma).sum(axis=-1)
    return 0.5 * mu * ((sigma ** 2).sum(axis=-1) - 3.0) - mu * log_sum + 0.5 * lam * log_sum ** 2

def nh_stretch_gradient(sigma: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    mu = np.asarray(mu, dtype=float)[..., None]
    lam = np.asarray(lam, dtype=float)[..., None]
    log_sum = np.log(sigma).sum(axis=-1)[..., None]
    return mu * sigma - mu / sigma + lam * log_sum / sigma

def nh_stretch_hessian(sigma: np.ndarray, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """
    Hessian of psi over principal stretches.

    H_ii = mu (1 + sigma_i^-2) + lambda (1 - ln prod sigma) / sigma_i^2
    H_ij = lambda / (sigma_i sigma_j)

    Returns:
        np.ndarray: (..., 3, 3), symmetric.
    """
    sigma = np.asarray(sigma, dtype=float)
    mu = np.asarray(mu, dtype=float)[..., None]
    lam = np.asarray(lam, dtype=float)[..., None]
    inv = 1.0 / sigma
    log_sum = np.log(sigma).sum(axis=-1)[..., None]

    hessian = (lam * inv)[..., :, None] * inv[..., None, :]
    diagonal = mu * (1.0 + inv ** 2) + lam * (1.0 - log_sum) * inv ** 2
    idx = np.arange(3)
    hessian[..., idx, idx] = diagonal
    return hessian
