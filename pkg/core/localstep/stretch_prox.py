from typing import Tuple, Union
import numpy as np
from core.material.neo_hookean import nh_stretch_energy, nh_stretch_gradient, nh_stretch_hessian
from .prox_result import ProxResult
from .spectral import signed_svd, recompose
from .exceptions import ProxDivergedError

SIGMA_FLOOR = 1e-6
START_FLOOR = 1e-2
NEWTON_MAX_ITERATIONS = 50
NEWTON_TOLERANCE = 1e-10
BACKTRACKING_HALVINGS = 30
ARMIJO_FRACTION = 1e-4
ROUND_OFF_FRACTION = 1e-12
VOLUME_MAX_ITERATIONS = 100
VOLUME_TOLERANCE = 1e-14
VOLUME_CHECK_TOLERANCE = 1e-10
VOLUME_GRID_START = 1e-12
VOLUME_GRID_POINTS = 64
VOLUME_BISECTIONS = 60

ArrayLike = Union[float, np.ndarray]

class NeoHookeanStretch:
    """Neo-Hookean density over principal stretches."""
    def __init__(self, mu: ArrayLike, lam: ArrayLike):
        self.mu = mu
        self.lam = lam

    def energy(self, sigma: np.ndarray) -> np.ndarray:
        return nh_stretch_energy(sigma, self.mu, self.lam)

    def gradient(self, sigma: np.ndarray) -> np.ndarray:
        return nh_stretch_gradient(sigma, self.mu, self.lam)

    def hessian(self, sigma: np.ndarray) -> np.ndarray:
        return nh_stretch_hessian(sigma, self.mu, self.lam)

class LogVolumeBarrier:
    """phi(sigma) = -mu sum ln sigma_i + (lambda / 2) (sum ln sigma_j)^2; unbounded as J -> 0+."""
    def __init__(self, mu: ArrayLike, lam: ArrayLike):
        self.mu = np.asarray(mu, dtype=float)
        self.lam = np.asarray(lam, dtype=float)

    def energy(self, sigma: np.ndarray) -> np.ndarray:
        log_sum = np.log(sigma).sum(axis=-1)
        return -self.mu * log_sum + 0.5 * self.lam * log_sum ** 2

    def gradient(self, sigma: np.ndarray) -> np.ndarray:
        log_sum = np.log(sigma).sum(axis=-1)[..., None]
        return (-self.mu[..., None] + self.lam[..., None] * log_sum) / sigma

    def hessian(self, sigma: np.ndarray) -> np.ndarray:
        inv = 1.0 / sigma
        log_sum = np.log(sigma).sum(axis=-1)[..., None]
        lam = self.lam[..., None]
        hessian = (lam * inv)[..., :, None] * inv[..., None, :]
        idx = np.arange(3)
        hessian[..., idx, idx] = (self.mu[..., None] + lam * (1.0 - log_sum)) * inv ** 2
        return hessian

def _objective(model, sigma: np.ndarray, sigma_f: np.ndarray, penalty: float) -> np.ndarray:
    return 0.5 * penalty * ((sigma - sigma_f) ** 2).sum(axis=-1) + model.energy(sigma)

def _residual(model, sigma: np.ndarray, sigma_f: np.ndarray, penalty: float) -> np.ndarray:
    return penalty * (sigma - sigma_f) + model.gradient(sigma)

def _descent_direction(hessian: np.ndarray, gradient: np.ndarray, penalty: float) -> np.ndarray:
    direction = -np.linalg.solve(hessian, gradient[..., None])[..., 0]
    uphill = np.einsum('ni,ni->n', direction, gradient) >= 0
    if np.any(uphill):
        eigenvalues, vectors = np.linalg.eigh(hessian[uphill])
        magnitudes = np.maximum(np.abs(eigenvalues), 1e-12 * penalty)
        rotated = np.einsum('nji,nj->ni', vectors, gradient[uphill]) / magnitudes
        direction[uphill] = -np.einsum('nij,nj->ni', vectors, rotated)
    return direction

def minimize_stretch(model, sigma_f: np.ndarray, penalty: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimizes (k / 2) ||sigma - sigma_F||^2 + phi(sigma) over sigma > 0, per element.

    Newton on H_phi + k I with Armijo backtracking (halving) and a positivity floor.
    Elements that already satisfy the tolerance are left untouched.

    Args:
        model: Object exposing energy/gradient/hessian over stretches, batched over elements.
        sigma_f: (n, 3) stretches of F.
        penalty: k, the proximal weight.

    Returns:
        Tuple: (sigma_star, iterations per element).

    Raises:
        ProxDivergedError: If any element misses the tolerance after the iteration cap.
    """
    sigma_f = np.atleast_2d(np.asarray(sigma_f, dtype=float))
    sigma = np.maximum(sigma_f, START_FLOOR)
    iterations = np.zeros(sigma.shape[0], dtype=np.int64)
    tolerance = NEWTON_TOLERANCE * penalty
    identity = np.eye(3)

    for iteration in range(NEWTON_MAX_ITERATIONS + 1):
        gradient = _residual(model, sigma, sigma_f, penalty)
        norms = np.linalg.norm(gradient, axis=-1)
        active = norms > tolerance
        if not np.any(active):
            return sigma, iterations

        if iteration == NEWTON_MAX_ITERATIONS:
            worst = int(np.argmax(norms))
            raise ProxDivergedError(worst, float(norms[worst]), NEWTON_MAX_ITERATIONS)

        hessian = model.hessian(sigma) + penalty * identity
        direction = np.zeros_like(sigma)
        direction[active] = _descent_direction(hessian[active], gradient[active], penalty)
        slope = np.einsum('ni,ni->n', gradient, direction)

        start_value = _objective(model, sigma, sigma_f, penalty)
        # Cancellation error grows with the largest terms of the objective, not with its value.
        term_scale = penalty * ((sigma ** 2).sum(axis=-1) + (sigma_f ** 2).sum(axis=-1)) + np.abs(model.energy(sigma))
        round_off = ROUND_OFF_FRACTION * (1.0 + term_scale)
        step = np.ones(sigma.shape[0])
        pending = active.copy()
        accepted = sigma.copy()

        for _ in range(BACKTRACKING_HALVINGS):
            candidate = np.maximum(sigma + step[:, None] * direction, SIGMA_FLOOR)
            value = _objective(model, candidate, sigma_f, penalty)
            armijo = value <= start_value + ARMIJO_FRACTION * step * slope
            flat = (value <= start_value + round_off) & (
                np.linalg.norm(_residual(model, candidate, sigma_f, penalty), axis=-1) < norms)
            ok = pending & (armijo | flat)
            accepted[ok] = candidate[ok]
            pending &= ~ok
            if not np.any(pending):
                break
            step[pending] *= 0.5

        if np.any(pending):
            stuck = np.flatnonzero(pending)
            worst = int(stuck[np.argmax(norms[stuck])])
            raise ProxDivergedError(worst, float(norms[worst]), iteration + 1)

        sigma = accepted
        iterations += active

    return sigma, iterations

def _stretch_prox(F: np.ndarray, model, penalty: float) -> ProxResult:
    F = np.asarray(F, dtype=float)
    single = F.ndim == 2
    batch = F.reshape(-1, 3, 3)
    u, sigma_f, v = signed_svd(batch)
    sigma_star, iterations = minimize_stretch(model, sigma_f, penalty)
    result = ProxResult(
        p_star=recompose(u, sigma_star, v),
        sigma_star=sigma_star,
        u_rot=u,
        v_rot=v,
        sigma_f=sigma_f,
        newton_iters=iterations,
    )
    if single:
        return ProxResult(*(array[0] for array in (result.p_star, result.sigma_star, result.u_rot,
                                                    result.v_rot, result.sigma_f, result.newton_iters)))
    return result

def nh_prox(F: np.ndarray, mean_mu: float, mean_lam: float, mean_k: float) -> ProxResult:
    """
    Proximal map of the Neo-Hookean density with penalty k, solved over principal stretches.

    Args:
        F: (3, 3) or (n, 3, 3) deformation gradients.
        mean_mu, mean_lam: Lame parameters the local step uses.
        mean_k: Proximal penalty, strictly positive.
    """
    if mean_k <= 0:
        raise ValueError(f"Proximal penalty must be positive, got {mean_k}.")
    return _stretch_prox(F, NeoHookeanStretch(mean_mu, mean_lam), mean_k)

def log_barrier_prox(F: np.ndarray, mu: ArrayLike, lam: ArrayLike, penalty: float) -> ProxResult:
    """Proximal map of the log-volume barrier with per-element (mu, lambda) and penalty k."""
    if penalty <= 0:
        raise ValueError(f"Proximal penalty must be positive, got {penalty}.")
    return _stretch_prox(F, LogVolumeBarrier(mu, lam), penalty)

def _upper_stretches(sigma_f: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    root = np.sqrt(np.maximum(sigma_f ** 2 + 4.0 * gamma[..., None], 0.0))
    return 0.5 * (sigma_f + root)

def _upper_branch(sigma_f: np.ndarray, gamma: np.ndarray, lower: np.ndarray) -> np.ndarray:
    # Newton on gamma; the constraint is concave and increasing, so iterates settle from below.
    for _ in range(VOLUME_MAX_ITERATIONS):
        sigma = _upper_stretches(sigma_f, gamma)
        constraint = np.log(sigma).sum(axis=-1)
        if np.all(np.abs(constraint) <= VOLUME_TOLERANCE):
            break
        root = 2.0 * sigma - sigma_f
        slope = (1.0 / (root * sigma)).sum(axis=-1)
        proposal = gamma - constraint / slope
        gamma = np.where(proposal <= lower, 0.5 * (gamma + lower), proposal)
    return _upper_stretches(sigma_f, gamma)

def _lower_branch(sigma_f: np.ndarray) -> np.ndarray:
    """
    Stationary points with the smallest stretch s on the lower root, s < sigma_F,min / 2.

    Along gamma = s (s - sigma_F,min) the other two stretches stay on the upper root. The
    volume constraint is not monotone in s there, so every sign change on a geometric grid
    is bisected and the stationary point closest to sigma_F is returned.
    """
    count = sigma_f.shape[0]
    smallest = np.argmin(sigma_f, axis=-1)
    a = sigma_f[np.arange(count), smallest]
    is_smallest = (np.arange(3)[None, :] == smallest[:, None])[:, None, :]

    def family(s: np.ndarray) -> np.ndarray:
        gamma = s * (s - a[:, None])
        return np.where(is_smallest, s[..., None], _upper_stretches(sigma_f[:, None, :], gamma))

    def constraint(s: np.ndarray) -> np.ndarray:
        return np.log(family(s)).sum(axis=-1)

    grid = 0.5 * a[:, None] * np.geomspace(VOLUME_GRID_START, 1.0, VOLUME_GRID_POINTS)[None, :]
    values = constraint(grid)
    low, high = grid[:, :-1], grid[:, 1:]
    low_negative = np.signbit(values[:, :-1])
    bracketed = low_negative != np.signbit(values[:, 1:])

    for _ in range(VOLUME_BISECTIONS):
        middle = 0.5 * (low + high)
        keep_high = np.signbit(constraint(middle)) == low_negative
        low = np.where(keep_high, middle, low)
        high = np.where(keep_high, high, middle)

    candidates = family(0.5 * (low + high))
    distance = np.where(bracketed, ((candidates - sigma_f[:, None, :]) ** 2).sum(axis=-1), np.inf)
    return candidates[np.arange(count), np.argmin(distance, axis=-1)]

def volume_stretches(sigma_f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Euclidean projection of stretches onto prod(sigma) = 1.

    The minimizer satisfies sigma_i (sigma_i - sigma_F,i) = gamma. While the volume can
    still be reached with every stretch on the upper root
    sigma_i = (sigma_F,i + sqrt(sigma_F,i^2 + 4 gamma)) / 2, gamma is found by Newton.
    Otherwise (gamma would pass -sigma_F,min^2 / 4) the smallest stretch moves to the
    lower root.

    Returns:
        Tuple: (sigma, stretch Jacobian d sigma / d sigma_F).

    Raises:
        ProxDivergedError: If the projected stretches miss prod(sigma) = 1.
    """
    sigma_f = np.atleast_2d(np.asarray(sigma_f, dtype=float))
    # a non-positive stretch needs gamma > 0 to keep sigma_i > 0
    inverted = np.min(sigma_f, axis=-1) <= 0.0
    lower = np.where(inverted, 0.0, -np.min(sigma_f ** 2, axis=-1) / 4.0)
    gamma = np.where(inverted, 1e-6 * np.maximum(1.0, np.max(sigma_f ** 2, axis=-1)), 0.0)

    sigma = np.empty_like(sigma_f)
    on_lower = ~inverted & (np.log(_upper_stretches(sigma_f, lower)).sum(axis=-1) > 0.0)
    on_upper = ~on_lower
    if np.any(on_upper):
        sigma[on_upper] = _upper_branch(sigma_f[on_upper], gamma[on_upper], lower[on_upper])
    if np.any(on_lower):
        sigma[on_lower] = _lower_branch(sigma_f[on_lower])

    residual = np.abs(np.log(sigma).sum(axis=-1))
    if np.any(~(residual <= VOLUME_CHECK_TOLERANCE)):
        worst = int(np.argmax(np.where(np.isfinite(residual), residual, np.inf)))
        raise ProxDivergedError(worst, float(residual[worst]), VOLUME_MAX_ITERATIONS)

    c = 1.0 / (2.0 * sigma - sigma_f)
    jacobian = np.einsum('ni,ij->nij', c * sigma, np.eye(3))
    jacobian -= c[:, :, None] * c[:, None, :] / (c / sigma).sum(axis=-1)[:, None, None]
    return sigma, jacobian

def volume_project(F: np.ndarray) -> Tuple[ProxResult, np.ndarray]:
    """Closest volume-preserving matrix U diag(sigma) V^T with prod sigma = 1, plus its stretch Jacobian."""
    F = np.asarray(F, dtype=float).reshape(-1, 3, 3)
    u, sigma_f, v = signed_svd(F)
    sigma, jacobian = volume_stretches(sigma_f)
    result = ProxResult(
        p_star=recompose(u, sigma, v),
        sigma_star=sigma,
        u_rot=u,
        v_rot=v,
        sigma_f=sigma_f,
        newton_iters=np.zeros(sigma.shape[0], dtype=np.int64),
    )
    return result, jacobian
