import pytest
from unittest.mock import patch
import numpy as np
from core.localstep.corotated import corotated_project, polar_differential
from core.localstep.stretch_prox import nh_prox, log_barrier_prox, volume_stretches, volume_project, minimize_stretch, NeoHookeanStretch
from core.localstep.spectral import signed_svd, recompose
from core.localstep.prox_hessian import prox_hessian
from core.localstep.differential import prox_differential
from core.material.neo_hookean import nh_stretch_gradient
from core.localstep.exceptions import ProxDivergedError

def _rotation(angle: float, axis: int) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    i, j = [k for k in range(3) if k != axis]
    R = np.eye(3)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return R

def _random_deformation(rng, low: float = 0.8, high: float = 1.2) -> np.ndarray:
    while True:
        F = np.eye(3) + 0.15 * rng.standard_normal((3, 3))
        if low <= np.linalg.det(F) <= high:
            return F

def _fd_jacobian(fn, F: np.ndarray, step: float) -> np.ndarray:
    columns = []
    for k in range(9):
        dF = np.zeros(9)
        dF[k] = step
        dF = dF.reshape(3, 3)
        columns.append((fn(F + dF) - fn(F - dF)).ravel() / (2 * step))
    return np.stack(columns, axis=1)

class TestSignedSvd:
    def test_reflection_goes_into_sigma(self):
        F = np.diag([1.0, 2.0, -0.5])
        u, sigma, v = signed_svd(F)
        assert np.linalg.det(u) == pytest.approx(1.0)
        assert np.linalg.det(v) == pytest.approx(1.0)
        assert sigma.min() < 0
        np.testing.assert_allclose(recompose(u, sigma, v), F, atol=1e-12)

class TestCorotatedProject:
    def test_identity(self):
        np.testing.assert_allclose(corotated_project(np.eye(3)).p_star, np.eye(3), atol=1e-12)

    def test_rotation_is_fixed(self):
        Q = _rotation(0.7, 1) @ _rotation(-0.3, 2)
        np.testing.assert_allclose(corotated_project(Q).p_star, Q, atol=1e-12)

    def test_symmetric_stretch_has_no_rotation(self):
        np.testing.assert_allclose(corotated_project(np.diag([2.0, 0.5, 1.0])).p_star, np.eye(3), atol=1e-12)

    def test_rotated_stretch(self):
        Q = _rotation(0.4, 0)
        np.testing.assert_allclose(corotated_project(Q @ np.diag([1.5, 0.8, 1.1])).p_star, Q, atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_polar_differential_matches_fd(self, seed):
        F = _random_deformation(np.random.default_rng(seed))
        analytic = polar_differential(corotated_project(F))
        fd = _fd_jacobian(lambda G: corotated_project(G).p_star, F, 1e-6)
        np.testing.assert_allclose(analytic, fd, atol=1e-6)

class TestNeoHookeanProx:
    def test_rest_is_fixed_point(self):
        result = nh_prox(np.eye(3), 1.0, 2.0, 4.0)
        np.testing.assert_allclose(result.sigma_star, 1.0, atol=1e-10)
        np.testing.assert_allclose(result.p_star, np.eye(3), atol=1e-10)

    def test_rotation_is_fixed_point(self):
        Q = _rotation(1.1, 2)
        np.testing.assert_allclose(nh_prox(Q, 1.0, 2.0, 4.0).p_star, Q, atol=1e-10)

    def test_huge_penalty_collapses_to_identity_map(self):
        F = np.diag([1.3, 0.9, 1.05])
        result = nh_prox(F, 1.0, 1.0, 1e12)
        np.testing.assert_allclose(result.sigma_star, result.sigma_f, atol=1e-6)

    def test_separable_closed_form(self):
        # lambda = 0 decouples: (s - s_F) + s - 1/s = 0
        result = nh_prox(np.diag([2.0, 1.0, 1.0]), 1.0, 0.0, 1.0)
        expected = (np.array([2.0, 1.0, 1.0]) + np.sqrt(np.array([4.0, 1.0, 1.0]) + 8.0)) / 4.0
        np.testing.assert_allclose(np.sort(result.sigma_star), np.sort(expected), atol=1e-6)

    def test_stationarity_at_exit(self):
        rng = np.random.default_rng(3)
        F = np.stack([_random_deformation(rng, 0.5, 2.0) for _ in range(10)])
        mean_mu, mean_lam, mean_k = 1.0, 3.0, 5.0
        result = nh_prox(F, mean_mu, mean_lam, mean_k)
        residual = mean_k * (result.sigma_star - result.sigma_f) + nh_stretch_gradient(result.sigma_star, mean_mu, mean_lam)
        assert np.abs(residual).max() <= 1e-10 * mean_k * np.sqrt(3)
        assert result.p_star.shape == (10, 3, 3)

    def test_inverted_input_recovers_positive_stretches(self):
        result = nh_prox(np.diag([1.0, 1.0, -0.2]), 1.0, 1.0, 3.0)
        assert np.all(result.sigma_star > 0)

    def test_rejects_non_positive_penalty(self):
        with pytest.raises(ValueError, match="penalty"):
            nh_prox(np.eye(3), 1.0, 1.0, 0.0)

    def test_minimize_stretch_skips_converged_elements(self):
        sigma, iterations = minimize_stretch(NeoHookeanStretch(1.0, 1.0), np.array([[1.0, 1.0, 1.0], [1.4, 1.0, 0.9]]), 3.0)
        assert iterations[0] == 0
        assert iterations[1] > 0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_converges_at_physical_stiffness(self, seed):
        # Lame pair of E = 1e4 Pa, nu = 0.3: the objective terms are far larger than its residual.
        mean_mu, mean_lam = 1e4 / 2.6, 1e4 * 0.3 / (1.3 * 0.4)
        mean_k = 2 * mean_mu + mean_lam
        rng = np.random.default_rng(seed)
        F = np.eye(3) + 0.01 * rng.standard_normal((3, 3))
        result = nh_prox(F, mean_mu, mean_lam, mean_k)
        residual = mean_k * (result.sigma_star - result.sigma_f) + nh_stretch_gradient(result.sigma_star, mean_mu, mean_lam)
        assert np.linalg.norm(residual) <= 1e-10 * mean_k

    def test_exhausted_backtracking_raises(self):
        with patch("core.localstep.stretch_prox.BACKTRACKING_HALVINGS", 0):
            with pytest.raises(ProxDivergedError, match="element 1"):
                minimize_stretch(NeoHookeanStretch(1.0, 1.0), np.array([[1.0, 1.0, 1.0], [1.4, 1.0, 0.9]]), 3.0)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_differential_matches_fd(self, seed):
        F = _random_deformation(np.random.default_rng(seed))
        mean_mu, mean_lam = 1.0, 1.5
        mean_k = 2 * mean_mu + mean_lam
        result = nh_prox(F, mean_mu, mean_lam, mean_k)
        hessian = prox_hessian(result.sigma_star, mean_mu, mean_lam, mean_k)
        analytic = prox_differential(result, hessian, mean_k)
        fd = _fd_jacobian(lambda G: nh_prox(G, mean_mu, mean_lam, mean_k).p_star, F, 1e-5)
        assert np.linalg.norm(analytic - fd) <= 1e-4 * np.linalg.norm(fd)

class TestLogBarrierProx:
    def test_rest_pushed_outward(self):
        result = log_barrier_prox(np.eye(3), 1.0, 0.5, 4.0)
        assert np.all(result.sigma_star > 1.0)

    def test_decoupled_without_lambda(self):
        sigma_f = np.array([1.2, 0.9, 1.0])
        mu, k = 0.7, 2.0
        result = log_barrier_prox(np.diag(sigma_f), mu, 0.0, k)
        expected = (sigma_f + np.sqrt(sigma_f ** 2 + 4 * mu / k)) / 2
        np.testing.assert_allclose(np.sort(result.sigma_star), np.sort(expected), atol=1e-8)

    def test_batched_per_element_parameters(self):
        F = np.stack([np.eye(3), np.eye(3)])
        result = log_barrier_prox(F, np.array([1.0, 2.0]), np.array([0.0, 0.0]), 4.0)
        assert result.sigma_star[1, 0] > result.sigma_star[0, 0]

class TestVolumeProjection:
    def test_unit_volume(self):
        rng = np.random.default_rng(5)
        sigma_f = rng.uniform(0.5, 1.8, size=(20, 3))
        sigma, _ = volume_stretches(sigma_f)
        np.testing.assert_allclose(np.prod(sigma, axis=1), 1.0, atol=1e-12)

    def test_volume_preserving_input_is_fixed(self):
        sigma, _ = volume_stretches(np.array([2.0, 0.5, 1.0]))
        np.testing.assert_allclose(sigma[0], [2.0, 0.5, 1.0], atol=1e-12)

    def test_inverted_stretch_is_recovered(self):
        sigma, _ = volume_stretches(np.array([1.0, 1.0, -0.3]))
        assert np.all(sigma > 0)
        assert np.prod(sigma) == pytest.approx(1.0, abs=1e-10)

    def test_jacobian_matches_fd(self):
        sigma_f = np.array([1.3, 0.8, 1.1])
        _, jacobian = volume_stretches(sigma_f)
        step = 1e-7
        fd = np.stack([(volume_stretches(sigma_f + step * e)[0][0] - volume_stretches(sigma_f - step * e)[0][0]) / (2 * step)
                       for e in np.eye(3)], axis=1)
        np.testing.assert_allclose(jacobian[0], fd, atol=1e-6)

    def test_volume_project_recomposes(self):
        F = np.diag([1.2, 1.0, 1.0])
        result, _ = volume_project(F)
        assert np.linalg.det(result.p_star[0]) == pytest.approx(1.0)

    def test_large_volume_moves_smallest_stretch_to_lower_root(self):
        sigma_f = np.array([1.065, 1.766, 1.667])
        sigma, _ = volume_stretches(sigma_f)
        assert np.prod(sigma) == pytest.approx(1.0, abs=1e-12)
        assert sigma[0, 0] < sigma_f[0] / 2
        multiplier = sigma[0] * (sigma[0] - sigma_f)
        np.testing.assert_allclose(multiplier, multiplier[0], atol=1e-10)

    def test_lower_root_is_closest_unit_volume_point(self):
        sigma_f = np.array([1.065, 1.766, 1.667])
        sigma, _ = volume_stretches(sigma_f)
        best = np.sum((sigma[0] - sigma_f) ** 2)

        rng = np.random.default_rng(11)
        trials = sigma[0] * np.exp(0.3 * rng.standard_normal((2000, 3)))
        trials /= np.cbrt(np.prod(trials, axis=1))[:, None]
        assert np.all(np.sum((trials - sigma_f) ** 2, axis=1) >= best - 1e-12)

    def test_lower_root_jacobian_matches_fd(self):
        sigma_f = np.array([1.065, 1.766, 1.667])
        _, jacobian = volume_stretches(sigma_f)
        step = 1e-7
        fd = np.stack([(volume_stretches(sigma_f + step * e)[0][0] - volume_stretches(sigma_f - step * e)[0][0]) / (2 * step)
                       for e in np.eye(3)], axis=1)
        np.testing.assert_allclose(jacobian[0], fd, atol=1e-6)

    def test_unit_volume_over_large_expansions(self):
        rng = np.random.default_rng(8)
        sigma_f = rng.uniform(0.3, 3.0, size=(200, 3))
        sigma, _ = volume_stretches(sigma_f)
        np.testing.assert_allclose(np.prod(sigma, axis=1), 1.0, atol=1e-10)

    def test_unconverged_projection_raises(self):
        with patch("core.localstep.stretch_prox.VOLUME_MAX_ITERATIONS", 1):
            with pytest.raises(ProxDivergedError, match="element 0"):
                volume_stretches(np.array([1.3, 0.8, 1.1]))
