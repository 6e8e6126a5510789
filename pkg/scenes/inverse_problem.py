import json, os, logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Union
from config.config_validator import ConfigValidator
from config.design_variable_kind import DesignVariableKind
from config.exceptions import ConfigFileNotFoundError, ConfigParseError
from .scene import Scene
from .scene_builder import load_scene

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class InverseProblem:
    """
    Scene plus what to optimize, against what, and with which optimizer settings.

    ``reference`` holds hidden design values (same keys as ``initial``) used to synthesize
    the reference trajectory with this simulator.
    """
    name: str
    scene: Scene
    variables: List[DesignVariableKind]
    loss: Dict[str, Any]
    reference: Dict[str, Any] = field(default_factory=dict)
    initial: Dict[str, Any] = field(default_factory=dict)
    optimizer: Dict[str, Any] = field(default_factory=dict)
    logging: Dict[str, Any] = field(default_factory=dict)

def _read_problem(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        logger.error(f"Problem file {path} does not exist.")
        raise ConfigFileNotFoundError(path)
    with open(path, 'r', encoding='utf-8') as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            logger.error(f"Failed to parse problem file {path}: {e}")
            raise ConfigParseError(path, e)

def load_problem(source: Union[str, Dict[str, Any]]) -> InverseProblem:
    """
    Loads an inverse problem from a JSON file or dict.

    The "scene" entry may be a generator name, a scene dict, or a scene file path
    relative to the problem file.
    """
    base_dir = ""
    if isinstance(source, dict):
        raw = source
        name = raw.get('name', 'problem')
    else:
        raw = _read_problem(source)
        base_dir = os.path.dirname(source)
        name = raw.get('name', os.path.splitext(os.path.basename(source))[0])

    ConfigValidator().validate_problem(raw)

    scene_source = raw['scene']
    if isinstance(scene_source, str) and scene_source.endswith('.json') and not os.path.isabs(scene_source):
        scene_source = os.path.join(base_dir, scene_source)
    scene = load_scene(scene_source)

    return InverseProblem(
        name=name,
        scene=scene,
        variables=[DesignVariableKind.from_string(variable) for variable in raw['variables']],
        loss=raw['loss'],
        reference=raw['loss'].get('reference', {}),
        initial=raw.get('initial', {}),
        optimizer=raw.get('optimizer', {}),
        logging=raw.get('logging', {}),
    )
