from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional
from utils.constants import DEFAULT_SOLVER_SETTINGS
from .backward_projection import BackwardProjection

@dataclass(frozen=True)
class SolverSettings:
    """
    Numerical settings shared by the forward and backward passes.

    ``aa_window`` of None selects the Anderson window from the material heterogeneity.
    ``backward_projection`` fixes the prox-Hessian filter of the backward pass or leaves it
    to the trust region; ``reuse_factor`` of False refactorizes the global matrix every step.
    """
    h: float = DEFAULT_SOLVER_SETTINGS["h"]
    max_iterations: int = DEFAULT_SOLVER_SETTINGS["max_iterations"]
    eps_rel: float = DEFAULT_SOLVER_SETTINGS["eps_rel"]
    eps_abs: float = DEFAULT_SOLVER_SETTINGS["eps_abs"]
    eps_tr: float = DEFAULT_SOLVER_SETTINGS["eps_tr"]
    aa_window: Optional[int] = DEFAULT_SOLVER_SETTINGS["aa_window"]
    heterogeneity_threshold: float = DEFAULT_SOLVER_SETTINGS["heterogeneity_threshold"]
    contact_margin: float = DEFAULT_SOLVER_SETTINGS["contact_margin"]
    contact_inner_iterations: int = DEFAULT_SOLVER_SETTINGS["contact_inner_iterations"]
    contact_tolerance: float = DEFAULT_SOLVER_SETTINGS["contact_tolerance"]
    adjoint_max_iterations: int = DEFAULT_SOLVER_SETTINGS["adjoint_max_iterations"]
    adjoint_tolerance: float = DEFAULT_SOLVER_SETTINGS["adjoint_tolerance"]
    strict_convergence: bool = DEFAULT_SOLVER_SETTINGS["strict_convergence"]
    backward_projection: str = DEFAULT_SOLVER_SETTINGS["backward_projection"]
    reuse_factor: bool = DEFAULT_SOLVER_SETTINGS["reuse_factor"]

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"Time step must be positive, got {self.h}.")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}.")
        if self.aa_window is not None and self.aa_window < 0:
            raise ValueError(f"aa_window must be non-negative, got {self.aa_window}.")
        BackwardProjection.from_string(self.backward_projection)
        if not isinstance(self.reuse_factor, bool):
            raise ValueError(f"reuse_factor must be a boolean, got {self.reuse_factor!r}.")

    @property
    def projection(self) -> BackwardProjection:
        return BackwardProjection.from_string(self.backward_projection)

    def window_for(self, heterogeneity_ratio: float) -> int:
        """Anderson window: the override if set, else 1 on heterogeneous meshes and 5 otherwise."""
        if self.aa_window is not None:
            return self.aa_window
        return 1 if heterogeneity_ratio > self.heterogeneity_threshold else 5

    def overridden(self, **changes: Any) -> "SolverSettings":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, values: Optional[Dict[str, Any]]) -> "SolverSettings":
        """Builds settings from a scene's "solver" section; unknown keys are ignored by the validator upstream."""
        known = {item.name for item in fields(cls)}
        return cls(**{key: value for key, value in (values or {}).items() if key in known})

    def to_dict(self) -> Dict[str, Any]:
        return {item.name: getattr(self, item.name) for item in fields(self)}
