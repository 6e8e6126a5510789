import json, os, logging
from typing import Any, Dict, List, Optional
from core.material.energy_kind import EnergyKind
from scenes.generators import resolve_scene_dict
from utils.constants import GRAVITY
from .solver_settings import SolverSettings
from .exceptions import ConfigFileNotFoundError, ConfigParseError

class ConfigManager:
    """
    Loads, resolves and validates one scene description.

    ``config`` may be given directly (e.g. a generator reference); otherwise ``config_file``
    is read as JSON.
    """
    def __init__(self, config_file, config_validator, config: Optional[Dict[str, Any]] = None):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.config_file = config_file
        self.config_validator = config_validator
        self.config = None
        if config is None:
            self.load_config()
        else:
            self.load_dict(config)

    def load_config(self):
        if not os.path.exists(self.config_file):
            self.logger.error(f"Config file {self.config_file} does not exist.")
            raise ConfigFileNotFoundError(self.config_file)

        with open(self.config_file, 'r', encoding='utf-8') as file:
            try:
                raw = json.load(file)
            except json.JSONDecodeError as e:
                self.logger.error(f"Failed to parse config file {self.config_file}: {e}")
                raise ConfigParseError(self.config_file, e)
        self.load_dict(raw)

    def load_dict(self, raw: Dict[str, Any]):
        self.config = resolve_scene_dict(raw)
        self.config_validator.validate(self.config)

    def get(self, key, default=None):
        return self.config.get(key, default)

    def get_scene_name(self) -> str:
        if 'name' in self.config:
            return self.config['name']
        if self.config_file:
            return os.path.splitext(os.path.basename(self.config_file))[0]
        return "scene"

    # --- Mesh ---
    def get_mesh(self) -> Dict[str, Any]:
        return self.config.get('mesh', {})

    # --- Material ---
    def get_material(self) -> Dict[str, Any]:
        return self.config.get('material', {})

    def get_energy_kind(self) -> EnergyKind:
        return EnergyKind.from_string(self.get_material().get('energy', EnergyKind.NEO_HOOKEAN.value))

    def get_young(self):
        return self.get_material().get('young')

    def get_poisson(self) -> float:
        return float(self.get_material().get('poisson'))

    def get_density(self) -> float:
        return float(self.get_material().get('density'))

    def get_regions(self) -> List[Dict[str, Any]]:
        return self.get_material().get('regions', [])

    def uses_log_volume_barrier(self) -> bool:
        return bool(self.get_material().get('log_volume_barrier', False))

    def get_damping(self) -> Dict[str, float]:
        material = self.get_material()
        return {"alpha": float(material.get('alpha', 0.0)), "beta0": float(material.get('beta0', 0.0))}

    # --- Boundary conditions and obstacles ---
    def get_dirichlet(self) -> List[Dict[str, Any]]:
        entries = list(self.config.get('dirichlet', []))
        listed = {entry['vertex'] for entry in entries}
        entries += [{"vertex": vertex} for vertex in self.config.get('pinned', []) if vertex not in listed]
        return entries

    def get_obstacles(self) -> List[Dict[str, Any]]:
        return self.config.get('obstacles', [])

    def get_attachments(self) -> List[Dict[str, Any]]:
        return self.config.get('attachments', [])

    # --- Loads ---
    def get_gravity(self) -> List[float]:
        return list(self.config.get('gravity', GRAVITY))

    def get_acceleration_profile(self):
        return self.config.get('f_ext', {}).get('acceleration')

    def get_state_force(self) -> Optional[Dict[str, Any]]:
        return self.config.get('state_force')

    # --- Initial state ---
    def get_initial_state(self) -> Dict[str, Any]:
        return self.config.get('initial_state', {})

    # --- Solver ---
    def get_solver_settings(self) -> SolverSettings:
        return SolverSettings.from_dict(self.config.get('solver'))

    def get_frames(self) -> int:
        return int(self.config.get('frames', 1))

    # --- Logging ---
    def get_logging(self):
        return self.config.get('logging', {})

    def get_logging_level(self) -> str:
        logging = self.get_logging()
        return logging.get('log_level', 'INFO').upper()

    def should_log_to_file(self) -> bool:
        logging = self.get_logging()
        return logging.get('log_to_file', False)
