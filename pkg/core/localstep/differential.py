from typing import Optional
import numpy as np
from core.material.energy_kind import ConstraintKind
from .prox_result import ProxResult
from .prox_hessian import ProxHessian
from .spectral import spectral_differential
from .corotated import polar_differential
from .exceptions import SingularFilteredHessianError

SINGULAR_TOLERANCE = 1e-12

def stretch_sensitivity(hessian: ProxHessian, penalty: float) -> np.ndarray:
    """
    d sigma* / d sigma_F = k H~^-1.

    Directions the blend clamps to zero are dropped (pseudo-inverse); an unfiltered
    Hessian near singularity is an error.
    """
    eigenvalues, vectors = np.linalg.eigh(hessian.h_filtered)
    threshold = SINGULAR_TOLERANCE * penalty
    small = np.abs(eigenvalues) < threshold

    if hessian.tau == 0.0 and np.any(small):
        flat = np.abs(eigenvalues).reshape(-1, 3).min(axis=-1)
        worst = int(np.argmin(flat))
        raise SingularFilteredHessianError(worst, float(flat[worst]))

    inverse = np.where(small, 0.0, 1.0 / np.where(small, 1.0, eigenvalues))
    return penalty * np.einsum('...ik,...k,...jk->...ij', vectors, inverse, vectors)

def prox_differential(result: ProxResult, hessian: ProxHessian, penalty: float) -> np.ndarray:
    """dp*/dF as (..., 9, 9) for a stretch prox, from the (filtered) stretch sensitivity and the SVD frame."""
    jacobian = stretch_sensitivity(hessian, penalty)
    return spectral_differential(result.u_rot, result.sigma_f, result.v_rot, result.sigma_star, jacobian)

def volume_differential(result: ProxResult, stretch_jacobian: np.ndarray) -> np.ndarray:
    return spectral_differential(result.u_rot, result.sigma_f, result.v_rot, result.sigma_star, stretch_jacobian)

def constraint_differential(
    kind: ConstraintKind,
    result: ProxResult,
    hessian: Optional[ProxHessian] = None,
    penalty: Optional[float] = None,
    stretch_jacobian: Optional[np.ndarray] = None
) -> np.ndarray:
    """Dispatches to the differential matching a constraint kind."""
    if kind == ConstraintKind.ROTATION:
        return polar_differential(result)
    if kind == ConstraintKind.VOLUME:
        return volume_differential(result, stretch_jacobian)
    return prox_differential(result, hessian, penalty)
