from typing import Tuple
import numpy as np

DEGENERACY_TOLERANCE = 1e-10

def signed_svd(F: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    SVD F = U diag(sigma) V^T with det U = det V = +1.

    A reflection is folded into the smallest singular value, which turns negative for
    inverted elements.

    Returns:
        Tuple: (U, sigma, V) with shapes (..., 3, 3), (..., 3), (..., 3, 3).
    """
    F = np.asarray(F, dtype=float)
    u, sigma, vh = np.linalg.svd(F)
    v = np.swapaxes(vh, -1, -2).copy()
    u = u.copy()
    sigma = sigma.copy()

    flip_u = np.linalg.det(u) < 0
    u[..., :, 2] = np.where(flip_u[..., None], -u[..., :, 2], u[..., :, 2])
    sigma[..., 2] = np.where(flip_u, -sigma[..., 2], sigma[..., 2])

    flip_v = np.linalg.det(v) < 0
    v[..., :, 2] = np.where(flip_v[..., None], -v[..., :, 2], v[..., :, 2])
    sigma[..., 2] = np.where(flip_v, -sigma[..., 2], sigma[..., 2])

    return u, sigma, v

def recompose(u: np.ndarray, sigma: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum('...ik,...k,...jk->...ij', u, sigma, v)

def frame_kron(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-major vec operator of X -> U X V^T, i.e. kron(U, V) of shape (..., 9, 9)."""
    lead = u.shape[:-2]
    return np.einsum('...ik,...jl->...ijkl', u, v).reshape(lead + (9, 9))

def spectral_differential(
    u: np.ndarray,
    sigma: np.ndarray,
    v: np.ndarray,
    values: np.ndarray,
    stretch_jacobian: np.ndarray
) -> np.ndarray:
    """
    Differential of the spectral map F = U diag(sigma) V^T -> U diag(f(sigma)) V^T.

    In the rotated frame A = U^T dF V the map keeps the stretch block on the diagonal
    (df_i = sum_j J_ij A_jj) and mixes each off-diagonal pair (A_ij, A_ji) through the
    divided differences (f_i - f_j) / (sigma_i - sigma_j) and (f_i + f_j) / (sigma_i + sigma_j).
    Coincident stretches use the limit J_ii - J_ij.

    Args:
        u, sigma, v: Signed SVD of F.
        values: f(sigma), shape (..., 3).
        stretch_jacobian: df/dsigma, shape (..., 3, 3).

    Returns:
        np.ndarray: (..., 9, 9) acting on row-major vec(dF).
    """
    lead = sigma.shape[:-1]
    local = np.zeros(lead + (9, 9))

    for i in range(3):
        for j in range(3):
            local[..., 3 * i + i, 3 * j + j] = stretch_jacobian[..., i, j]

    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            gap = sigma[..., i] - sigma[..., j]
            scale = np.maximum(1.0, np.abs(sigma[..., i]))
            coincident = np.abs(gap) <= DEGENERACY_TOLERANCE * scale
            safe_gap = np.where(coincident, 1.0, gap)
            minus = np.where(
                coincident,
                stretch_jacobian[..., i, i] - stretch_jacobian[..., i, j],
                (values[..., i] - values[..., j]) / safe_gap,
            )

            total = sigma[..., i] + sigma[..., j]
            floor = DEGENERACY_TOLERANCE * scale
            safe_total = np.where(np.abs(total) < floor, np.where(total < 0, -floor, floor), total)
            plus = (values[..., i] + values[..., j]) / safe_total

            local[..., 3 * i + j, 3 * i + j] = 0.5 * (minus + plus)
            local[..., 3 * i + j, 3 * j + i] = 0.5 * (minus - plus)

    frame = frame_kron(u, v)
    return frame @ local @ np.swapaxes(frame, -1, -2)
