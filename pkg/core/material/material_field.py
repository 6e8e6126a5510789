import hashlib, logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple
import numpy as np
from core.mesh.tet_mesh import TetMesh
from .energy_kind import EnergyKind, ConstraintKind
from .lame import lame_from_young_poisson, pd_weight
from .exceptions import InvalidMaterialError

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class MaterialField:
    """
    Per-element material state plus the mesh-wide means used by the local step.

    ``pd_weight`` has one column per registered constraint (see ``constraint_kinds``).
    """
    young: np.ndarray
    poisson: float
    mu: np.ndarray
    lam: np.ndarray
    pd_weight: np.ndarray
    beta: np.ndarray
    beta0: float
    alpha: float
    mean_mu: float
    mean_lam: float
    mean_k: float
    energy_kind: EnergyKind
    log_volume_barrier: bool
    version: str

    @property
    def constraint_kinds(self) -> Tuple[ConstraintKind, ...]:
        if self.energy_kind == EnergyKind.NEO_HOOKEAN:
            return (ConstraintKind.NEO_HOOKEAN_PROX,)
        if self.log_volume_barrier:
            return (ConstraintKind.ROTATION, ConstraintKind.LOG_BARRIER)
        return (ConstraintKind.ROTATION, ConstraintKind.VOLUME)

    @property
    def num_elements(self) -> int:
        return self.young.shape[0]

    def weight_sensitivity(self) -> np.ndarray:
        """dw/dE per element and constraint at fixed nu (weights are linear in E)."""
        mu_unit, lam_unit = lame_from_young_poisson(1.0, self.poisson)
        unit = pd_weight(self.energy_kind, mu_unit, lam_unit)
        return np.broadcast_to(unit, self.pd_weight.shape).copy()

    def heterogeneity_ratio(self) -> float:
        """max w / min w over the leading (stiffness-carrying) constraint column."""
        leading = self.pd_weight[:, 0]
        return float(leading.max() / leading.min())

    def with_weights(self, weights: np.ndarray) -> "MaterialField":
        """Copy with projective weights overridden; Lame data and means are kept."""
        weights = np.array(weights, dtype=float).reshape(self.pd_weight.shape)
        if np.any(weights < 0):
            raise InvalidMaterialError("Projective weights must be non-negative.")
        weights.setflags(write=False)
        field = replace(self, pd_weight=weights)
        return replace(field, version=_material_version(field))

def mesh_means(field: MaterialField, mesh: TetMesh) -> Tuple[float, float, float]:
    """Volume-weighted means (mu_bar, lambda_bar, k_bar) with k_bar = 2 mu_bar + lambda_bar."""
    return _volume_means(field.mu, field.lam, mesh)

def _volume_means(mu: np.ndarray, lam: np.ndarray, mesh: TetMesh) -> Tuple[float, float, float]:
    volumes = mesh.rest_volume
    total = volumes.sum()
    mean_mu = float(np.dot(volumes, mu) / total)
    mean_lam = float(np.dot(volumes, lam) / total)
    mean_k = float(pd_weight(EnergyKind.NEO_HOOKEAN, mean_mu, mean_lam)[0])
    return mean_mu, mean_lam, mean_k

def _material_version(field: MaterialField) -> str:
    digest = hashlib.sha1()
    for array in (field.young, field.pd_weight, field.beta):
        digest.update(np.ascontiguousarray(array).tobytes())
    digest.update(repr((field.poisson, field.alpha, field.beta0, field.energy_kind.value,
                        field.log_volume_barrier, field.mean_mu, field.mean_lam)).encode())
    return digest.hexdigest()

def build_material_field(
    mesh: TetMesh,
    young,
    poisson: float,
    energy_kind: EnergyKind,
    log_volume_barrier: bool = False,
    alpha: float = 0.0,
    beta0: float = 0.0,
    frozen_means: Optional[Sequence[float]] = None
) -> MaterialField:
    """
    Builds the per-element material field.

    Args:
        mesh: Mesh the field lives on.
        young: Scalar or (n_e,) Young's moduli in Pa.
        poisson: Shared Poisson's ratio.
        energy_kind: Corotated composite or Neo-Hookean prox.
        log_volume_barrier: Replace the corotated volume constraint by the log barrier.
        alpha: Mass-proportional damping (1/s).
        beta0: Largest stiffness-proportional damping coefficient (s).
        frozen_means: Optional (mu_bar, lambda_bar) to keep fixed instead of recomputing,
            used when perturbing E under the fixed-means gradient convention.
    """
    young = np.broadcast_to(np.asarray(young, dtype=float), (mesh.num_elements,)).copy()
    if alpha < 0 or beta0 < 0:
        raise InvalidMaterialError(f"Damping coefficients must be non-negative, got alpha={alpha}, beta0={beta0}.")
    if log_volume_barrier and energy_kind != EnergyKind.COROTATED:
        raise InvalidMaterialError("The log-volume barrier composes with the corotated rotation step only.")

    mu, lam = lame_from_young_poisson(young, poisson)
    weights = pd_weight(energy_kind, mu, lam)
    beta = beta0 * mu / mu.max()

    if frozen_means is None:
        mean_mu, mean_lam, mean_k = _volume_means(mu, lam, mesh)
    else:
        mean_mu, mean_lam = (float(value) for value in frozen_means[:2])
        mean_k = float(pd_weight(EnergyKind.NEO_HOOKEAN, mean_mu, mean_lam)[0])

    for array in (young, mu, lam, weights, beta):
        array.setflags(write=False)

    field = MaterialField(
        young=young,
        poisson=float(poisson),
        mu=mu,
        lam=lam,
        pd_weight=weights,
        beta=beta,
        beta0=float(beta0),
        alpha=float(alpha),
        mean_mu=mean_mu,
        mean_lam=mean_lam,
        mean_k=mean_k,
        energy_kind=energy_kind,
        log_volume_barrier=bool(log_volume_barrier),
        version="",
    )
    field = replace(field, version=_material_version(field))
    logger.debug(f"Material field built: kind={energy_kind.value}, heterogeneity={field.heterogeneity_ratio():.2f}")
    return field
