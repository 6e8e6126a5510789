from enum import Enum
from typing import Optional

class BackwardProjection(Enum):
    """Eigenvalue treatment of the prox-map Hessian in the backward pass."""
    ADAPTIVE = "adaptive"
    NONE = "none"
    CLAMP = "clamp"
    ABS = "abs"

    @staticmethod
    def from_string(projection_str: str):
        try:
            return BackwardProjection(projection_str)
        except ValueError:
            raise ValueError(f"Invalid backward projection: '{projection_str}'. Available projections are: {', '.join([kind.value for kind in BackwardProjection])}")

    @property
    def fixed_tau(self) -> Optional[float]:
        """Blend parameter of a fixed projection; None when the trust region picks it."""
        return {
            BackwardProjection.NONE: 0.0,
            BackwardProjection.CLAMP: 0.5,
            BackwardProjection.ABS: 1.0,
        }.get(self)
