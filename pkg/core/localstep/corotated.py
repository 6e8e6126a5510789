import numpy as np
from .prox_result import ProxResult
from .spectral import signed_svd, recompose, spectral_differential

def corotated_project(F: np.ndarray) -> ProxResult:
    """Closest rotation R = U V^T from the signed SVD; reflections stay in sigma."""
    F = np.asarray(F, dtype=float)
    u, sigma_f, v = signed_svd(F)
    ones = np.ones_like(sigma_f)
    return ProxResult(
        p_star=recompose(u, ones, v),
        sigma_star=ones,
        u_rot=u,
        v_rot=v,
        sigma_f=sigma_f,
        newton_iters=np.zeros(sigma_f.shape[:-1], dtype=np.int64),
    )

def polar_differential(result: ProxResult) -> np.ndarray:
    """dR/dF as (..., 9, 9): only the skew part of U^T dF V survives, scaled by 2 / (sigma_i + sigma_j)."""
    jacobian = np.zeros(result.sigma_f.shape + (3,))
    return spectral_differential(result.u_rot, result.sigma_f, result.v_rot, result.sigma_star, jacobian)
