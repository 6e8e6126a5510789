import logging
from typing import Any, Dict
import numpy as np
from tabulate import tabulate
from core.factor.factor_manager import FactorManager
from core.factor.delassus import delassus
from core.contact.contact_set import detect_contacts
from scenes.scene import Scene

logger = logging.getLogger(__name__)

def exactness_residual(factor, samples: int = 100, seed: int = 0) -> float:
    """max over random v of |A (S^T S v) - v| / |v|."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        v = rng.standard_normal(factor.size)
        residual = factor.multiply(factor.apply_inverse(v)) - v
        worst = max(worst, float(np.linalg.norm(residual) / np.linalg.norm(v)))
    return worst

def delassus_consistency(factor, jacobian: np.ndarray) -> float:
    """Largest gap between the batched Delassus block and one built column by column."""
    block = delassus(factor, jacobian)
    columns = np.stack([np.stack([factor.apply_inverse(row[:, axis]) for axis in range(3)], axis=1) for row in jacobian])
    matrix = np.einsum('kvi,lvi->kl', jacobian, columns)
    return float(np.max(np.abs(block.matrix - matrix), initial=0.0))

def run_factor_stats(scene: Scene, samples: int = 100, seed: int = 0) -> Dict[str, Any]:
    """Factorizes the scene's operator once and reports fill, timing and exactness."""
    material = scene.material()
    manager = FactorManager(scene.mesh, scene.partition)
    factor = manager.ensure(material, scene.settings.h)

    stats = {
        "scene": scene.name,
        "vertices": scene.num_vertices,
        "free_vertices": int(scene.partition.num_free),
        "elements": scene.mesh.num_elements,
        "ordering": factor.ordering,
        "nnz_A": int(factor.operator.nnz),
        "nnz_S": int(factor.s_factor.nnz),
        "nnz_ratio": factor.nnz_ratio,
        "factor_seconds": factor.factor_seconds,
        "exactness_residual": exactness_residual(factor, samples, seed),
    }

    state = scene.initial_state()
    contacts = detect_contacts(scene.mesh, state.q, scene.obstacles, scene.settings.contact_margin,
                               excluded=scene.partition.fixed.tolist(), attachments=scene.attachments)
    if not contacts.is_empty:
        jacobian = contacts.jacobian(scene.partition.free_index, scene.partition.num_free)
        stats["contact_rows"] = int(jacobian.shape[0])
        stats["delassus_gap"] = delassus_consistency(factor, jacobian)

    logger.info("\n" + tabulate([[key, value] for key, value in stats.items()], headers=["factor-stats", ""], tablefmt="github"))
    return stats
