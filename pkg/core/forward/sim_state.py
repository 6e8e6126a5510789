from dataclasses import dataclass
import numpy as np
from .exceptions import InvalidStateError

@dataclass(frozen=True)
class SimState:
    """Positions and velocities as (n_v, 3) arrays at a given time."""
    q: np.ndarray
    v: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.q.shape != self.v.shape or self.q.ndim != 2 or self.q.shape[1] != 3:
            raise InvalidStateError(f"State arrays must share shape (n_v, 3), got {self.q.shape} and {self.v.shape}.")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.v))):
            raise InvalidStateError("State contains non-finite entries.")

    @classmethod
    def at_rest(cls, positions: np.ndarray, time: float = 0.0) -> "SimState":
        positions = np.array(positions, dtype=float)
        return cls(q=positions, v=np.zeros_like(positions), time=time)

    @property
    def num_vertices(self) -> int:
        return self.q.shape[0]
