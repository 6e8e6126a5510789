import hashlib
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
from core.localstep.element_projection import LocalProjection
from core.contact.contact_set import ContactSet
from core.contact.contact_solver import ContactSolution
from core.factor.delassus import DelassusBlock

@dataclass(frozen=True)
class ForwardCache:
    """Everything the backward pass needs from one converged forward step; arrays are read-only."""
    frame: int
    h: float
    q_start: np.ndarray
    v_start: np.ndarray
    q_tilde: np.ndarray
    q_prev_iterate: np.ndarray
    q_star: np.ndarray
    v_next: np.ndarray
    f_ext: np.ndarray
    projection: LocalProjection = field(repr=False)
    contact_set: ContactSet = field(repr=False)
    contact_solution: ContactSolution = field(repr=False)
    delassus: Optional[DelassusBlock] = field(default=None, repr=False)
    jacobian: Optional[np.ndarray] = field(default=None, repr=False)
    iteration_count: int = 0
    converged: bool = True
    step_residual: float = 0.0
    rhs_residual: float = 0.0
    material_version: str = ""
    factor_signature: str = ""

    def __post_init__(self):
        for array in (self.q_start, self.v_start, self.q_tilde, self.q_prev_iterate, self.q_star, self.v_next, self.f_ext):
            array.setflags(write=False)

    @property
    def lambda_star(self) -> np.ndarray:
        return self.contact_solution.multipliers

    @property
    def has_contacts(self) -> bool:
        return not self.contact_set.is_empty

    def digest(self) -> str:
        """Content hash of the state-carrying arrays, used to check the cache is never mutated."""
        digest = hashlib.sha1()
        for array in (self.q_start, self.v_start, self.q_tilde, self.q_prev_iterate, self.q_star, self.v_next,
                      self.projection.targets(), self.contact_solution.multipliers):
            digest.update(np.ascontiguousarray(array).tobytes())
        return digest.hexdigest()
