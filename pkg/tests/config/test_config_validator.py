import pytest
from config.config_validator import ConfigValidator
from config.exceptions import ConfigValidationError

class TestConfigValidator:
    @pytest.fixture
    def config_validator(self):
        return ConfigValidator()

    @pytest.fixture
    def valid_problem(self):
        return {
            "scene": "two-tet",
            "variables": ["E", "velocity"],
            "loss": {"type": "target_com", "target": [0.0, 0.0, 0.1]},
            "optimizer": {"memory": 5, "max_evals": 20, "gtol": 1e-6},
        }

    def test_validate_valid_config(self, config_validator, valid_config):
        try:
            config_validator.validate(valid_config)
        except ConfigValidationError:
            pytest.fail("Valid configuration raised ConfigValidationError")

    def test_validate_missing_required_fields(self, config_validator):
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate({"material": {}})

        missing_fields = excinfo.value.missing_fields
        assert 'mesh' in missing_fields
        assert 'frames' in missing_fields
        assert 'material.young' in missing_fields
        assert 'material.poisson' in missing_fields
        assert 'material.density' in missing_fields

    def test_validate_invalid_mesh(self, config_validator, valid_config):
        valid_config['mesh']['elements'] = [[0, 1, 2, 9]]
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'mesh.elements' in excinfo.value.invalid_fields

    def test_validate_grid_mesh(self, config_validator, valid_config):
        valid_config['mesh'] = {"grid": {"dims": [2, 0, 1], "spacing": -1.0}}
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert excinfo.value.invalid_fields == ['mesh.grid.dims', 'mesh.grid.spacing']

    @pytest.mark.parametrize("key,value", [
        ("poisson", 0.5),
        ("young", -1.0),
        ("density", 0),
        ("energy", "stvk"),
        ("alpha", -0.1),
    ])
    def test_validate_invalid_material(self, config_validator, valid_config, key, value):
        valid_config['material'][key] = value
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert f'material.{key}' in excinfo.value.invalid_fields

    def test_log_barrier_needs_corotated(self, config_validator, valid_config):
        valid_config['material']['log_volume_barrier'] = True
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'material.log_volume_barrier' in excinfo.value.invalid_fields

    def test_validate_invalid_obstacles(self, config_validator, valid_config):
        valid_config['obstacles'] = [
            {"type": "plane"},
            {"type": "halfspace", "normal": [0.0, 0.0, 0.0]},
            {"type": "sphere", "center": [0.0, 0.0, 0.0], "radius": 0.0, "friction": -1.0},
        ]
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert excinfo.value.invalid_fields == [
            'obstacles[0].type', 'obstacles[1].normal', 'obstacles[2].radius', 'obstacles[2].friction']

    def test_validate_invalid_dirichlet(self, config_validator, valid_config):
        valid_config['dirichlet'] = [{"position": [0.0, 0.0, 0.0]}, {"vertex": -1}]
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'dirichlet[0].vertex' in excinfo.value.missing_fields
        assert 'dirichlet[1].vertex' in excinfo.value.invalid_fields

    def test_validate_per_frame_acceleration_length(self, config_validator, valid_config):
        valid_config['f_ext'] = {"acceleration": [[0.0, 0.0, 1.0]] * 2}
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'f_ext.acceleration' in excinfo.value.invalid_fields

    def test_validate_unknown_solver_key(self, config_validator, valid_config):
        valid_config['solver']['tolerance'] = 1e-6
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'solver.tolerance' in excinfo.value.invalid_fields

    def test_validate_invalid_solver_value(self, config_validator, valid_config):
        valid_config['solver']['h'] = 0.0
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'solver' in excinfo.value.invalid_fields

    @pytest.mark.parametrize("key, value", [("backward_projection", "flip"), ("reuse_factor", "yes")])
    def test_validate_invalid_ablation_setting(self, config_validator, valid_config, key, value):
        valid_config["solver"][key] = value
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert "solver" in excinfo.value.invalid_fields

    def test_validate_ablation_settings(self, config_validator, valid_config):
        valid_config["solver"].update({"backward_projection": "clamp", "reuse_factor": False})
        config_validator.validate(valid_config)

    @pytest.mark.parametrize("frames", [0, 2.5, True])
    def test_validate_invalid_frames(self, config_validator, valid_config, frames):
        valid_config['frames'] = frames
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'frames' in excinfo.value.invalid_fields

    def test_validate_invalid_log_level(self, config_validator, valid_config):
        valid_config['logging']['log_level'] = 'VERBOSE'
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'logging.log_level' in excinfo.value.invalid_fields

    def test_validate_initial_positions_count(self, config_validator, valid_config):
        valid_config['initial_state']['positions'] = [[0.0, 0.0, 0.0]]
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate(valid_config)
        assert 'initial_state.positions' in excinfo.value.invalid_fields

    def test_validate_valid_problem(self, config_validator, valid_problem):
        config_validator.validate_problem(valid_problem)

    def test_validate_problem_errors(self, config_validator, valid_problem):
        valid_problem['variables'] = ["E", "mass"]
        valid_problem['loss'] = {"type": "trajectory_match"}
        valid_problem['optimizer'] = {"memory": 0}
        with pytest.raises(ConfigValidationError, match="Problem validation error") as excinfo:
            config_validator.validate_problem(valid_problem)
        assert excinfo.value.missing_fields == ['loss.reference']
        assert excinfo.value.invalid_fields == ['variables[1]', 'optimizer.memory']

    def test_target_com_needs_a_target(self, config_validator, valid_problem):
        del valid_problem['loss']['target']
        with pytest.raises(ConfigValidationError) as excinfo:
            config_validator.validate_problem(valid_problem)
        assert 'loss.target' in excinfo.value.invalid_fields
