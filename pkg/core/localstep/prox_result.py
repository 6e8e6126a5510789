from dataclasses import dataclass
import numpy as np

@dataclass(frozen=True)
class ProxResult:
    """
    Per-element projection targets together with the factors they were built from.

    Arrays carry a leading element axis when produced for a whole mesh; ``p_star`` is
    always ``u_rot @ diag(sigma_star) @ v_rot.T``.
    """
    p_star: np.ndarray
    sigma_star: np.ndarray
    u_rot: np.ndarray
    v_rot: np.ndarray
    sigma_f: np.ndarray
    newton_iters: np.ndarray

    def freeze(self) -> "ProxResult":
        for array in (self.p_star, self.sigma_star, self.u_rot, self.v_rot, self.sigma_f, self.newton_iters):
            array.setflags(write=False)
        return self
