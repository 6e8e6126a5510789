import pytest
from config.backward_projection import BackwardProjection
from config.solver_settings import SolverSettings

class TestSolverSettings:
    def test_defaults_keep_adaptive_projection_and_factor_reuse(self):
        settings = SolverSettings()
        assert settings.projection == BackwardProjection.ADAPTIVE
        assert settings.reuse_factor is True

    @pytest.mark.parametrize("value, tau", [("adaptive", None), ("none", 0.0), ("clamp", 0.5), ("abs", 1.0)])
    def test_projection_blend(self, value, tau):
        assert SolverSettings(backward_projection=value).projection.fixed_tau == tau

    def test_unknown_projection_is_rejected(self):
        with pytest.raises(ValueError, match="Invalid backward projection: 'flip'"):
            SolverSettings(backward_projection="flip")

    def test_reuse_flag_must_be_boolean(self):
        with pytest.raises(ValueError, match="reuse_factor must be a boolean"):
            SolverSettings(reuse_factor=1)

    def test_round_trips_through_dict(self):
        settings = SolverSettings(backward_projection="abs", reuse_factor=False)
        assert SolverSettings.from_dict(settings.to_dict()) == settings

    def test_window_override(self):
        assert SolverSettings().window_for(100.0) == 1
        assert SolverSettings().window_for(1.0) == 5
        assert SolverSettings(aa_window=2).window_for(100.0) == 2
