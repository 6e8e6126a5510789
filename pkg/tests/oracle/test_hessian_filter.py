import pytest
import numpy as np
from core.oracle.hessian_filter import HessianFilter, EnergyModel, filter_hessians
from core.oracle.newton import NewtonConfig

class TestHessianFilter:
    def test_from_string(self):
        assert HessianFilter.from_string("abs") == HessianFilter.ABS
        assert EnergyModel.from_string("pd_surrogate") == EnergyModel.PD_SURROGATE

    def test_from_string_invalid(self):
        with pytest.raises(ValueError, match="Invalid Hessian filter: 'flip'"):
            HessianFilter.from_string("flip")
        with pytest.raises(ValueError, match="Invalid energy model"):
            EnergyModel.from_string("stvk")

    def test_clamp_and_abs(self):
        rotation = np.array([[0.6, -0.8], [0.8, 0.6]])
        block = rotation @ np.diag([-2.0, 3.0]) @ rotation.T

        np.testing.assert_allclose(filter_hessians(block[None], HessianFilter.CLAMP)[0],
                                   rotation @ np.diag([0.0, 3.0]) @ rotation.T, atol=1e-12)
        np.testing.assert_allclose(filter_hessians(block[None], HessianFilter.ABS)[0],
                                   rotation @ np.diag([2.0, 3.0]) @ rotation.T, atol=1e-12)

    def test_none_passes_through(self):
        blocks = np.random.default_rng(0).standard_normal((2, 3, 3))
        assert filter_hessians(blocks, HessianFilter.NONE) is blocks

class TestNewtonConfig:
    def test_defaults(self):
        config = NewtonConfig()
        assert config.filter == HessianFilter.CLAMP
        assert config.energy_model == EnergyModel.NEO_HOOKEAN

    @pytest.mark.parametrize("kwargs,message", [
        ({"grad_tol": 0.0}, "grad_tol must be positive"),
        ({"shrink": 1.0}, "shrink factor"),
        ({"shrink": 0.0}, "shrink factor"),
    ])
    def test_invalid(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            NewtonConfig(**kwargs)
