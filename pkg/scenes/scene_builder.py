import os, logging
from typing import Any, Dict, Union
import numpy as np
from config.config_manager import ConfigManager
from config.config_validator import ConfigValidator
from config.exceptions import ConfigValidationError
from core.mesh.mesh_loader import mesh_from_dict
from core.mesh.tet_mesh import TetMesh
from core.factor.assembly import build_partition
from core.contact.obstacle import obstacle_from_dict
from core.contact.contact_set import Attachment
from core.forward.state_force import AnchorSpringForce
from .generators import GENERATORS
from .scene import Scene, MaterialSpec

logger = logging.getLogger(__name__)

def load_scene_config(source: Union[str, Dict[str, Any]]) -> ConfigManager:
    """
    Resolves a scene source into a validated ConfigManager.

    Args:
        source: Path to a scene JSON file, a built-in generator name, or a scene dict.
    """
    if isinstance(source, dict):
        return ConfigManager(None, ConfigValidator(), config=source)
    if not os.path.exists(source) and source in GENERATORS:
        return ConfigManager(None, ConfigValidator(), config={"generator": source})
    return ConfigManager(source, ConfigValidator())

def _material_spec(config_manager: ConfigManager, mesh: TetMesh) -> MaterialSpec:
    young = np.atleast_1d(np.asarray(config_manager.get_young(), dtype=float))
    if young.size not in (1, mesh.num_elements):
        raise ConfigValidationError(invalid_fields=['material.young'],
                                    message=f"material.young needs 1 or {mesh.num_elements} values")
    element_young = np.broadcast_to(young, (mesh.num_elements,)).copy()

    region_index = np.zeros(mesh.num_elements, dtype=np.int64)
    names = ["base"]
    for number, region in enumerate(config_manager.get_regions(), start=1):
        elements = np.asarray(region['elements'], dtype=np.int64)
        if elements.min() < 0 or elements.max() >= mesh.num_elements:
            raise ConfigValidationError(invalid_fields=[f'material.regions[{number - 1}].elements'])
        region_index[elements] = number
        element_young[elements] = float(region['young'])
        names.append(region.get('name', f"region{number}"))

    damping = config_manager.get_damping()
    return MaterialSpec(
        energy_kind=config_manager.get_energy_kind(),
        poisson=config_manager.get_poisson(),
        element_young=element_young,
        region_index=region_index,
        region_names=tuple(names),
        log_volume_barrier=config_manager.uses_log_volume_barrier(),
        alpha=damping["alpha"],
        beta0=damping["beta0"],
    )

def _acceleration(config_manager: ConfigManager, frames: int) -> np.ndarray:
    profile = config_manager.get_acceleration_profile()
    if profile is None:
        return np.zeros((frames, 3))
    profile = np.asarray(profile, dtype=float)
    return np.tile(profile, (frames, 1)) if profile.ndim == 1 else profile.copy()

def build_scene(config_manager: ConfigManager) -> Scene:
    """Turns a validated scene configuration into simulation objects."""
    mesh = mesh_from_dict(config_manager.get_mesh(), config_manager.get_density())
    rest = mesh.rest_positions

    try:
        dirichlet = [(entry['vertex'], entry.get('position', rest[entry['vertex']]))
                     for entry in config_manager.get_dirichlet()]
        partition = build_partition(mesh.num_vertices, dirichlet)
    except (IndexError, ValueError) as e:
        logger.error(f"Invalid Dirichlet list: {e}")
        raise ConfigValidationError(invalid_fields=['dirichlet'])

    attachments = tuple(
        Attachment(int(entry['vertex']), np.asarray(entry['direction'], dtype=float) / np.linalg.norm(entry['direction']),
                   float(entry['target']))
        for entry in config_manager.get_attachments()
    )

    state_force = None
    spring = config_manager.get_state_force()
    if spring is not None:
        vertices = np.asarray(spring['vertices'], dtype=np.int64)
        anchors = np.asarray(spring.get('anchors', rest[vertices]), dtype=float)
        state_force = AnchorSpringForce(vertices, anchors, spring['stiffness'], spring.get('damping', 0.0))

    initial = config_manager.get_initial_state()
    frames = config_manager.get_frames()
    scene = Scene(
        name=config_manager.get_scene_name(),
        mesh=mesh,
        material_spec=_material_spec(config_manager, mesh),
        partition=partition,
        obstacles=tuple(obstacle_from_dict(spec) for spec in config_manager.get_obstacles()),
        attachments=attachments,
        gravity=np.asarray(config_manager.get_gravity(), dtype=float),
        acceleration=_acceleration(config_manager, frames),
        initial_positions=np.asarray(initial.get('positions', rest), dtype=float),
        initial_velocity=np.asarray(initial.get('velocity', [0.0, 0.0, 0.0]), dtype=float),
        initial_translation=np.asarray(initial.get('translation', [0.0, 0.0, 0.0]), dtype=float),
        initial_rotation=np.asarray(initial.get('rotation', [0.0, 0.0, 0.0]), dtype=float),
        settings=config_manager.get_solver_settings(),
        frames=frames,
        state_force=state_force,
    )
    logger.info(f"Scene '{scene.name}': {mesh.num_vertices} vertices, {mesh.num_elements} elements, "
                f"{partition.fixed.size} Dirichlet vertices, {len(scene.obstacles)} obstacles, {frames} frames")
    return scene

def load_scene(source: Union[str, Dict[str, Any]]) -> Scene:
    return build_scene(load_scene_config(source))
