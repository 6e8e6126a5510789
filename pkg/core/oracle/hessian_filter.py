from enum import Enum
import numpy as np

class HessianFilter(Enum):
    NONE = "none"
    CLAMP = "clamp"
    ABS = "abs"

    @staticmethod
    def from_string(filter_str: str):
        try:
            return HessianFilter(filter_str)
        except ValueError:
            raise ValueError(f"Invalid Hessian filter: '{filter_str}'. Available filters are: {', '.join([kind.value for kind in HessianFilter])}")

class EnergyModel(Enum):
    """Objective the Newton oracle minimizes: the hyperelastic primal or the PD surrogate."""
    NEO_HOOKEAN = "neohookean"
    PD_SURROGATE = "pd_surrogate"

    @staticmethod
    def from_string(model_str: str):
        try:
            return EnergyModel(model_str)
        except ValueError:
            raise ValueError(f"Invalid energy model: '{model_str}'. Available models are: {', '.join([model.value for model in EnergyModel])}")

def filter_hessians(hessians: np.ndarray, kind: HessianFilter) -> np.ndarray:
    """Per-element eigenvalue filter of symmetric blocks: clamp to max(k, 0) or take |k|."""
    if kind == HessianFilter.NONE:
        return hessians
    symmetric = 0.5 * (hessians + np.swapaxes(hessians, -1, -2))
    eigenvalues, vectors = np.linalg.eigh(symmetric)
    if kind == HessianFilter.CLAMP:
        eigenvalues = np.maximum(eigenvalues, 0.0)
    else:
        eigenvalues = np.abs(eigenvalues)
    return np.einsum('...ik,...k,...jk->...ij', vectors, eigenvalues, vectors)
