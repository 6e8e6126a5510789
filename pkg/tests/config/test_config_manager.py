import pytest, json
from unittest.mock import patch, mock_open, Mock
from config.config_manager import ConfigManager
from config.config_validator import ConfigValidator
from config.solver_settings import SolverSettings
from config.exceptions import ConfigFileNotFoundError, ConfigParseError, UnknownGeneratorError
from core.material.energy_kind import EnergyKind

class TestConfigManager:
    @pytest.fixture
    def mock_validator(self):
        return Mock(spec=ConfigValidator)

    @pytest.fixture
    def config_manager(self, mock_validator, valid_config):
        mocked_open = mock_open(read_data=json.dumps(valid_config))
        with patch("builtins.open", mocked_open), patch("os.path.exists", return_value=True):
            return ConfigManager("scene.json", mock_validator)

    def test_load_config_valid(self, config_manager, valid_config, mock_validator):
        mock_validator.validate.assert_called_once_with(valid_config)
        assert config_manager.config == valid_config

    def test_load_config_file_not_found(self, mock_validator):
        with patch("os.path.exists", return_value=False):
            with pytest.raises(ConfigFileNotFoundError):
                ConfigManager("scene.json", mock_validator)

    def test_load_config_json_decode_error(self, mock_validator):
        mocked_open = mock_open(read_data='{"mesh": ')
        with patch("builtins.open", mocked_open), patch("os.path.exists", return_value=True):
            with pytest.raises(ConfigParseError) as excinfo:
                ConfigManager("scene.json", mock_validator)
        assert excinfo.value.line == 1

    def test_get_scene_name(self, config_manager):
        assert config_manager.get_scene_name() == "two-tet-test"

    def test_scene_name_falls_back_to_the_file_name(self, mock_validator, valid_config):
        del valid_config["name"]
        mocked_open = mock_open(read_data=json.dumps(valid_config))
        with patch("builtins.open", mocked_open), patch("os.path.exists", return_value=True):
            manager = ConfigManager("scenes/drop_test.json", mock_validator)
        assert manager.get_scene_name() == "drop_test"

    def test_material_getters(self, config_manager):
        assert config_manager.get_energy_kind() == EnergyKind.NEO_HOOKEAN
        assert config_manager.get_young() == 1e4
        assert config_manager.get_poisson() == 0.3
        assert config_manager.get_density() == 1000.0
        assert config_manager.get_regions() == []
        assert not config_manager.uses_log_volume_barrier()
        assert config_manager.get_damping() == {"alpha": 0.0, "beta0": 0.0}

    def test_get_dirichlet_merges_pinned_vertices(self, mock_validator, valid_config):
        valid_config["pinned"] = [0, 3]
        manager = ConfigManager(None, mock_validator, config=valid_config)
        assert manager.get_dirichlet() == [{"vertex": 0, "position": [0.0, 0.0, 0.0]}, {"vertex": 3}]

    def test_get_gravity(self, config_manager):
        assert config_manager.get_gravity() == [0.0, 0.0, -9.81]

    def test_get_solver_settings(self, config_manager):
        settings = config_manager.get_solver_settings()
        assert isinstance(settings, SolverSettings)
        assert settings.h == 0.01
        assert settings.max_iterations == 200

    def test_get_frames(self, config_manager):
        assert config_manager.get_frames() == 3

    def test_optional_sections_default_to_empty(self, config_manager):
        assert config_manager.get_attachments() == []
        assert config_manager.get_state_force() is None
        assert config_manager.get_acceleration_profile() is None

    def test_get_logging(self, config_manager):
        assert config_manager.get_logging_level() == "INFO"
        assert config_manager.should_log_to_file() is False

    def test_generator_reference_is_expanded(self, mock_validator):
        manager = ConfigManager(None, mock_validator, config={"generator": "two-tet", "frames": 7})
        assert manager.get_scene_name() == "two-tet"
        assert manager.get_frames() == 7
        assert len(manager.get_mesh()["vertices"]) == 5

    def test_unknown_generator(self, mock_validator):
        with pytest.raises(UnknownGeneratorError, match="Available generators are"):
            ConfigManager(None, mock_validator, config={"generator": "teapot"})
