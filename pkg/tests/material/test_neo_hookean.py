import pytest
import numpy as np
from core.material.neo_hookean import (nh_energy, nh_pk1, nh_stress_differential, nh_stretch_energy,
                                       nh_stretch_gradient, nh_stretch_hessian)
from core.material.exceptions import NonPositiveJacobianError

def _random_f(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.eye(3) + 0.2 * rng.standard_normal((3, 3))

class TestNeoHookeanEnergy:
    def test_rest_state_is_zero(self):
        assert nh_energy(np.eye(3), 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_uniform_stretch(self):
        assert nh_energy(2.0 * np.eye(3), 1.0, 0.0) == pytest.approx(4.5 - np.log(8.0), rel=1e-12)

    def test_barrier_grows_near_collapse(self):
        small = np.diag([1e-6, 1.0, 1.0])
        larger = np.diag([1e-3, 1.0, 1.0])
        assert nh_energy(small, 1.0, 1.0) > nh_energy(larger, 1.0, 1.0)

    def test_inverted_f_raises(self):
        with pytest.raises(NonPositiveJacobianError, match="Non-positive"):
            nh_energy(np.diag([-1.0, 1.0, 1.0]), 1.0, 1.0)

    def test_batched_reports_worst_element(self):
        F = np.stack([np.eye(3), np.diag([1.0, 1.0, -2.0])])
        with pytest.raises(NonPositiveJacobianError) as error:
            nh_energy(F, 1.0, 1.0)
        assert error.value.element == 1

class TestPk1:
    def test_rest_stress_free(self):
        np.testing.assert_allclose(nh_pk1(np.eye(3), 3.0, 2.0), 0.0, atol=1e-15)

    def test_uniaxial(self):
        np.testing.assert_allclose(nh_pk1(np.diag([2.0, 1.0, 1.0]), 1.0, 0.0), np.diag([1.5, 0.0, 0.0]), atol=1e-14)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_is_gradient_of_energy(self, seed):
        F = _random_f(seed)
        mu, lam = 1.3, 2.1
        step = 1e-6
        fd = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                dF = np.zeros((3, 3))
                dF[i, j] = step
                fd[i, j] = (nh_energy(F + dF, mu, lam) - nh_energy(F - dF, mu, lam)) / (2 * step)
        np.testing.assert_allclose(nh_pk1(F, mu, lam), fd, rtol=1e-6, atol=1e-8)

    def test_stress_differential_matches_fd(self):
        F = _random_f(5)
        mu, lam = 0.7, 1.9
        step = 1e-6
        differential = nh_stress_differential(F, mu, lam)
        for k in range(9):
            dF = np.zeros(9)
            dF[k] = step
            dF = dF.reshape(3, 3)
            fd = (nh_pk1(F + dF, mu, lam) - nh_pk1(F - dF, mu, lam)).ravel() / (2 * step)
            np.testing.assert_allclose(differential[:, k], fd, rtol=1e-5, atol=1e-7)

class TestStretchHessian:
    def test_rest_without_lambda(self):
        np.testing.assert_allclose(nh_stretch_hessian(np.ones(3), 1.0, 0.0), 2.0 * np.eye(3))

    def test_rest_with_lambda(self):
        expected = np.ones((3, 3)) + 2.0 * np.eye(3)
        np.testing.assert_allclose(nh_stretch_hessian(np.ones(3), 1.0, 1.0), expected)

    def test_symmetric(self):
        H = nh_stretch_hessian(np.array([0.3, 1.2, 2.0]), 1.0, 5.0)
        np.testing.assert_allclose(H, H.T)

    def test_gradient_matches_energy(self):
        sigma = np.array([0.8, 1.1, 1.4])
        step = 1e-7
        fd = [(nh_stretch_energy(sigma + step * e, 1.0, 2.0) - nh_stretch_energy(sigma - step * e, 1.0, 2.0)) / (2 * step)
              for e in np.eye(3)]
        np.testing.assert_allclose(nh_stretch_gradient(sigma, 1.0, 2.0), fd, rtol=1e-6)

    @pytest.mark.parametrize("sigma", [np.ones(3), np.array([0.5, 1.3, 2.2])])
    def test_hessian_matches_gradient(self, sigma):
        step = 1e-6
        fd = np.stack([(nh_stretch_gradient(sigma + step * e, 1.0, 2.0) - nh_stretch_gradient(sigma - step * e, 1.0, 2.0)) / (2 * step)
                       for e in np.eye(3)], axis=1)
        np.testing.assert_allclose(nh_stretch_hessian(sigma, 1.0, 2.0), fd, rtol=1e-6, atol=1e-8)

    def test_can_be_indefinite(self):
        grid = np.linspace(0.1, 3.0, 12)
        sigmas = np.stack(np.meshgrid(grid, grid, grid, indexing='ij'), axis=-1).reshape(-1, 3)
        eigenvalues = np.linalg.eigvalsh(nh_stretch_hessian(sigmas, 1.0, 100.0))
        assert eigenvalues.min() < 0
