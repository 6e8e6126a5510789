import logging
from dataclasses import fields
from typing import Any, List, Tuple
from core.material.energy_kind import EnergyKind
from core.contact.obstacle import ObstacleKind
from .solver_settings import SolverSettings
from .loss_kind import LossKind
from .design_variable_kind import DesignVariableKind
from .exceptions import ConfigValidationError

VALID_LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']

def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)

def _is_vector(value: Any, size: int = 3) -> bool:
    return isinstance(value, list) and len(value) == size and all(_is_number(x) for x in value)

class ConfigValidator:
    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def validate(self, config):
        missing_fields = []
        invalid_fields = []
        missing_fields += self._validate_required_fields(config)
        missing_mesh, invalid_mesh = self._validate_mesh(config)
        missing_fields += missing_mesh
        invalid_fields += invalid_mesh
        missing_material, invalid_material = self._validate_material(config)
        missing_fields += missing_material
        invalid_fields += invalid_material
        missing_boundary, invalid_boundary = self._validate_dirichlet(config)
        missing_fields += missing_boundary
        invalid_fields += invalid_boundary
        missing_obstacles, invalid_obstacles = self._validate_obstacles(config)
        missing_fields += missing_obstacles
        invalid_fields += invalid_obstacles
        invalid_fields += self._validate_forces(config)
        invalid_fields += self._validate_initial_state(config)
        invalid_fields += self._validate_solver(config)
        invalid_fields += self._validate_frames(config)
        invalid_fields += self._validate_logging(config)

        if missing_fields or invalid_fields:
            raise ConfigValidationError(missing_fields=missing_fields, invalid_fields=invalid_fields)

    def validate_problem(self, problem):
        """Checks an inverse-problem file; the embedded scene is validated on its own when it is built."""
        missing_fields = [field for field in ('scene', 'variables', 'loss') if field not in problem]
        invalid_fields = []
        if missing_fields:
            self.logger.error(f"Missing required problem fields: {missing_fields}")

        variables = problem.get('variables', [])
        if not isinstance(variables, list) or not variables:
            invalid_fields.append('variables')
        else:
            for index, variable in enumerate(variables):
                try:
                    DesignVariableKind.from_string(variable)
                except ValueError as e:
                    self.logger.error(str(e))
                    invalid_fields.append(f'variables[{index}]')

        loss = problem.get('loss', {})
        if 'loss' in problem:
            try:
                kind = LossKind.from_string(loss.get('type', ''))
                if kind == LossKind.TARGET_COM and not _is_vector(loss.get('target')):
                    self.logger.error("A target_com loss needs a 3-vector 'target'.")
                    invalid_fields.append('loss.target')
                if kind in (LossKind.TRAJECTORY_MATCH, LossKind.FINAL_POSE) and 'reference' not in loss:
                    missing_fields.append('loss.reference')
            except ValueError as e:
                self.logger.error(str(e))
                invalid_fields.append('loss.type')

        optimizer = problem.get('optimizer', {})
        for key in ('memory', 'max_evals'):
            value = optimizer.get(key)
            if value is not None and (not isinstance(value, int) or value < 1):
                self.logger.error(f"optimizer.{key} must be a positive integer.")
                invalid_fields.append(f'optimizer.{key}')
        tolerance = optimizer.get('gtol')
        if tolerance is not None and (not _is_number(tolerance) or tolerance <= 0):
            invalid_fields.append('optimizer.gtol')

        invalid_fields += self._validate_logging(problem)
        if missing_fields or invalid_fields:
            raise ConfigValidationError(missing_fields=missing_fields, invalid_fields=invalid_fields,
                                        message="Problem validation error")

    def _validate_required_fields(self, config):
        required_fields = ['mesh', 'material', 'frames']
        missing_fields = [field for field in required_fields if field not in config]
        if missing_fields:
            self.logger.error(f"Missing required fields: {missing_fields}")
        return missing_fields

    def _validate_mesh(self, config) -> Tuple[List[str], List[str]]:
        missing_fields = []
        invalid_fields = []
        if 'mesh' not in config:
            return missing_fields, invalid_fields
        mesh = config['mesh']

        if 'grid' in mesh:
            grid = mesh['grid']
            dims = grid.get('dims')
            if not (isinstance(dims, list) and len(dims) == 3 and all(isinstance(d, int) and d >= 1 for d in dims)):
                self.logger.error("mesh.grid.dims must be three positive integers.")
                invalid_fields.append('mesh.grid.dims')
            spacing = grid.get('spacing')
            if not _is_number(spacing) or spacing <= 0:
                self.logger.error("mesh.grid.spacing must be a positive number.")
                invalid_fields.append('mesh.grid.spacing')
            return missing_fields, invalid_fields

        for key in ('vertices', 'elements'):
            if key not in mesh:
                missing_fields.append(f'mesh.{key}')
        if missing_fields:
            self.logger.error(f"Missing mesh fields: {missing_fields}")
            return missing_fields, invalid_fields

        vertices = mesh['vertices']
        if not isinstance(vertices, list) or not vertices or not all(_is_vector(v) for v in vertices):
            self.logger.error("mesh.vertices must be a non-empty list of 3-vectors.")
            invalid_fields.append('mesh.vertices')
        elements = mesh['elements']
        if not isinstance(elements, list) or not all(
                isinstance(e, list) and len(e) == 4 and all(isinstance(i, int) for i in e) for e in elements):
            self.logger.error("mesh.elements must be a list of 4-index lists.")
            invalid_fields.append('mesh.elements')
        elif isinstance(vertices, list) and any(i < 0 or i >= len(vertices) for e in elements for i in e):
            self.logger.error("mesh.elements references a vertex that does not exist.")
            invalid_fields.append('mesh.elements')
        return missing_fields, invalid_fields

    def _validate_material(self, config) -> Tuple[List[str], List[str]]:
        missing_fields = []
        invalid_fields = []
        if 'material' not in config:
            return missing_fields, invalid_fields
        material = config['material']

        for key in ('young', 'poisson', 'density'):
            if key not in material:
                missing_fields.append(f'material.{key}')
        if missing_fields:
            self.logger.error(f"Missing material fields: {missing_fields}")

        young = material.get('young')
        if young is not None:
            values = young if isinstance(young, list) else [young]
            if not values or not all(_is_number(value) and value > 0 for value in values):
                self.logger.error("material.young must be positive.")
                invalid_fields.append('material.young')

        poisson = material.get('poisson')
        if poisson is not None and (not _is_number(poisson) or not 0.0 <= poisson < 0.5):
            self.logger.error(f"Invalid Poisson's ratio: {poisson}. Must lie in [0, 0.5).")
            invalid_fields.append('material.poisson')

        density = material.get('density')
        if density is not None and (not _is_number(density) or density <= 0):
            self.logger.error("material.density must be positive.")
            invalid_fields.append('material.density')

        energy = material.get('energy', EnergyKind.NEO_HOOKEAN.value)
        try:
            kind = EnergyKind.from_string(energy)
            if material.get('log_volume_barrier', False) and kind != EnergyKind.COROTATED:
                self.logger.error("log_volume_barrier is only valid with the corotated energy.")
                invalid_fields.append('material.log_volume_barrier')
        except ValueError as e:
            self.logger.error(str(e))
            invalid_fields.append('material.energy')

        for key in ('alpha', 'beta0'):
            value = material.get(key, 0.0)
            if not _is_number(value) or value < 0:
                self.logger.error(f"material.{key} must be a non-negative number.")
                invalid_fields.append(f'material.{key}')

        for index, region in enumerate(material.get('regions', [])):
            if not isinstance(region.get('elements'), list) or not region['elements']:
                invalid_fields.append(f'material.regions[{index}].elements')
            if not _is_number(region.get('young')) or region['young'] <= 0:
                invalid_fields.append(f'material.regions[{index}].young')
        return missing_fields, invalid_fields

    def _validate_dirichlet(self, config) -> Tuple[List[str], List[str]]:
        missing_fields = []
        invalid_fields = []
        for index, entry in enumerate(config.get('dirichlet', [])):
            if 'vertex' not in entry:
                missing_fields.append(f'dirichlet[{index}].vertex')
            elif not isinstance(entry['vertex'], int) or entry['vertex'] < 0:
                invalid_fields.append(f'dirichlet[{index}].vertex')
            if 'position' in entry and not _is_vector(entry['position']):
                invalid_fields.append(f'dirichlet[{index}].position')

        pinned = config.get('pinned', [])
        if not isinstance(pinned, list) or not all(isinstance(v, int) and v >= 0 for v in pinned):
            invalid_fields.append('pinned')

        for index, attachment in enumerate(config.get('attachments', [])):
            for key in ('vertex', 'direction', 'target'):
                if key not in attachment:
                    missing_fields.append(f'attachments[{index}].{key}')
            if 'direction' in attachment and not _is_vector(attachment['direction']):
                invalid_fields.append(f'attachments[{index}].direction')

        if missing_fields or invalid_fields:
            self.logger.error(f"Invalid boundary conditions: {missing_fields + invalid_fields}")
        return missing_fields, invalid_fields

    def _validate_obstacles(self, config) -> Tuple[List[str], List[str]]:
        missing_fields = []
        invalid_fields = []
        for index, obstacle in enumerate(config.get('obstacles', [])):
            try:
                kind = ObstacleKind.from_string(obstacle.get('type', ''))
            except ValueError as e:
                self.logger.error(str(e))
                invalid_fields.append(f'obstacles[{index}].type')
                continue

            if kind == ObstacleKind.HALFSPACE:
                if 'normal' not in obstacle:
                    missing_fields.append(f'obstacles[{index}].normal')
                elif not _is_vector(obstacle['normal']) or not any(obstacle['normal']):
                    invalid_fields.append(f'obstacles[{index}].normal')
            else:
                if 'center' not in obstacle:
                    missing_fields.append(f'obstacles[{index}].center')
                radius = obstacle.get('radius')
                if not _is_number(radius) or radius <= 0:
                    invalid_fields.append(f'obstacles[{index}].radius')

            friction = obstacle.get('friction', 0.0)
            if not _is_number(friction) or friction < 0:
                invalid_fields.append(f'obstacles[{index}].friction')

        if missing_fields or invalid_fields:
            self.logger.error(f"Invalid obstacles: {missing_fields + invalid_fields}")
        return missing_fields, invalid_fields

    def _validate_forces(self, config) -> List[str]:
        invalid_fields = []
        if 'gravity' in config and not _is_vector(config['gravity']):
            self.logger.error("gravity must be a 3-vector.")
            invalid_fields.append('gravity')

        acceleration = config.get('f_ext', {}).get('acceleration')
        if acceleration is not None:
            per_frame = isinstance(acceleration, list) and acceleration and isinstance(acceleration[0], list)
            valid = all(_is_vector(a) for a in acceleration) if per_frame else _is_vector(acceleration)
            if per_frame and isinstance(config.get('frames'), int) and len(acceleration) != config['frames']:
                valid = False
            if not valid:
                self.logger.error("f_ext.acceleration must be a 3-vector or one 3-vector per frame.")
                invalid_fields.append('f_ext.acceleration')

        state_force = config.get('state_force')
        if state_force is not None:
            if state_force.get('type') != 'anchor_spring':
                self.logger.error(f"Unknown state force type: {state_force.get('type')}")
                invalid_fields.append('state_force.type')
            stiffness = state_force.get('stiffness')
            if not _is_number(stiffness) or stiffness < 0:
                invalid_fields.append('state_force.stiffness')
            if not isinstance(state_force.get('vertices'), list):
                invalid_fields.append('state_force.vertices')
        return invalid_fields

    def _validate_initial_state(self, config) -> List[str]:
        invalid_fields = []
        initial_state = config.get('initial_state', {})
        for key in ('velocity', 'translation', 'rotation'):
            if key in initial_state and not _is_vector(initial_state[key]):
                self.logger.error(f"initial_state.{key} must be a 3-vector.")
                invalid_fields.append(f'initial_state.{key}')

        positions = initial_state.get('positions')
        vertices = config.get('mesh', {}).get('vertices')
        if positions is not None:
            if not isinstance(positions, list) or not all(_is_vector(p) for p in positions):
                invalid_fields.append('initial_state.positions')
            elif isinstance(vertices, list) and len(positions) != len(vertices):
                self.logger.error("initial_state.positions must have one entry per mesh vertex.")
                invalid_fields.append('initial_state.positions')
        return invalid_fields

    def _validate_solver(self, config) -> List[str]:
        invalid_fields = []
        solver = config.get('solver', {})
        known = {item.name for item in fields(SolverSettings)}
        for key in solver:
            if key not in known:
                self.logger.error(f"Unknown solver setting: {key}")
                invalid_fields.append(f'solver.{key}')

        try:
            SolverSettings.from_dict(solver)
        except (TypeError, ValueError) as e:
            self.logger.error(f"Invalid solver settings: {e}")
            invalid_fields.append('solver')
        return invalid_fields

    def _validate_frames(self, config) -> List[str]:
        frames = config.get('frames')
        if frames is not None and (not isinstance(frames, int) or isinstance(frames, bool) or frames < 1):
            self.logger.error(f"frames must be a positive integer, got {frames}.")
            return ['frames']
        return []

    def _validate_logging(self, config) -> List[str]:
        invalid_fields = []
        logging_settings = config.get('logging', {})

        log_level = logging_settings.get('log_level')
        if log_level is not None and (not isinstance(log_level, str) or log_level.upper() not in VALID_LOG_LEVELS):
            self.logger.error(f"Invalid log level: {log_level}. Must be one of {VALID_LOG_LEVELS}.")
            invalid_fields.append('logging.log_level')

        if 'log_to_file' in logging_settings and not isinstance(logging_settings['log_to_file'], bool):
            self.logger.error("log_to_file must be a boolean.")
            invalid_fields.append('logging.log_to_file')
        return invalid_fields
