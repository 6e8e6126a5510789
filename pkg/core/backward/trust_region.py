import logging
from dataclasses import dataclass
import numpy as np
from core.mesh.tet_mesh import TetMesh
from core.material.material_field import MaterialField
from core.material.exceptions import NonPositiveJacobianError
from core.factor.assembly import DofPartition
from core.factor.sparse_factor import SparseFactor
from core.forward.forward_cache import ForwardCache
from .energy import primal_energy

MODEL_FLOOR = 1e-12
CLAMP_TAU = 0.5
ABSOLUTE_TAU = 1.0

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class TrustRegionChoice:
    tau: float
    rho: float
    actual_decrease: float
    model_decrease: float

def select_tau(rho: float, eps_tr: float) -> float:
    """tau* = 1/2 when the quadratic model predicts the decrease to within eps_tr, else 1."""
    if np.isfinite(rho) and abs(rho - 1.0) <= eps_tr:
        return CLAMP_TAU
    return ABSOLUTE_TAU

def tr_select_tau(
    cache: ForwardCache,
    factor: SparseFactor,
    partition: DofPartition,
    mesh: TetMesh,
    material: MaterialField,
    eps_tr: float
) -> TrustRegionChoice:
    """
    Chooses one global blend parameter from the last PD increment.

    rho compares the actual decrease Phi(q*-1) - Phi(q*) of the primal objective with the
    quadratic model (1/2)|dq^T A dq|, evaluated with a single product against the factored
    operator. An undefined Phi (inverted element at either iterate) gives rho = NaN and tau = 1.
    """
    free = partition.free
    step = cache.q_star[free] - cache.q_prev_iterate[free]
    model = 0.5 * abs(float(np.sum(step * factor.multiply(step))))

    try:
        actual = (primal_energy(cache.q_prev_iterate, cache.q_tilde, mesh, material, cache.h)
                  - primal_energy(cache.q_star, cache.q_tilde, mesh, material, cache.h))
    except NonPositiveJacobianError as e:
        logger.debug(f"Frame {cache.frame}: primal energy undefined ({e}); using tau = 1")
        return TrustRegionChoice(tau=ABSOLUTE_TAU, rho=float('nan'), actual_decrease=float('nan'), model_decrease=model)

    rho = 1.0 if model < MODEL_FLOOR else actual / model
    tau = select_tau(rho, eps_tr)
    logger.debug(f"Frame {cache.frame}: rho = {rho:.4f}, tau* = {tau}")
    return TrustRegionChoice(tau=tau, rho=float(rho), actual_decrease=float(actual), model_decrease=model)
