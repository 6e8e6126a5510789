from typing import Tuple, Union
import numpy as np
from .energy_kind import EnergyKind
from .exceptions import InvalidPoissonError, InvalidMaterialError

ArrayLike = Union[float, np.ndarray]

def lame_from_young_poisson(young: ArrayLike, poisson: float) -> Tuple[ArrayLike, ArrayLike]:
    """
    Converts Young's modulus and Poisson's ratio to Lame parameters.

    Args:
        young: Young's modulus E > 0 (Pa), scalar or per-element array.
        poisson: Shared Poisson's ratio in [0, 0.5).

    Returns:
        Tuple: (mu, lam) with the same shape as ``young``.
    """
    if not 0.0 <= poisson < 0.5:
        raise InvalidPoissonError(poisson)

    young_array = np.asarray(young, dtype=float)
    if np.any(young_array <= 0):
        raise InvalidMaterialError("Young's modulus must be strictly positive.")

    mu = young_array / (2.0 * (1.0 + poisson))
    lam = young_array * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))

    if np.ndim(young) == 0:
        return float(mu), float(lam)
    return mu, lam

def pd_weight(energy_kind: EnergyKind, mu: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """
    Projective weights of the constraints an element registers.

    Neo-Hookean registers one proximal constraint with weight 2 mu + lambda. The
    corotated composite registers a rotation constraint (2 mu) and a volume
    constraint (lambda); the log-volume barrier replaces the latter with the same weight.

    Returns:
        np.ndarray: Shape (..., 1) for Neo-Hookean, (..., 2) for corotated.
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)

    if energy_kind == EnergyKind.NEO_HOOKEAN:
        return (2.0 * mu + lam)[..., None]

    return np.stack([2.0 * mu, lam * np.ones_like(mu)], axis=-1)
