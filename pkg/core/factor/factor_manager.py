import hashlib, logging
from typing import Optional
import numpy as np
import scipy.sparse as sp
from core.mesh.tet_mesh import TetMesh
from core.material.material_field import MaterialField
from .assembly import DofPartition, assemble_global, assemble_damping, restrict
from .sparse_factor import SparseFactor, factorize
from .exceptions import StaleFactorError

def compute_signature(mesh: TetMesh, material: MaterialField, h: float, partition: Optional[DofPartition] = None) -> str:
    """Fingerprint of (topology, Dirichlet set, material version, alpha, beta0, h)."""
    digest = hashlib.sha1()
    digest.update(np.ascontiguousarray(mesh.elements).tobytes())
    digest.update(str(mesh.num_vertices).encode())
    if partition is not None:
        digest.update(partition.key())
    digest.update(material.version.encode())
    digest.update(repr((material.alpha, material.beta0, float(h))).encode())
    return digest.hexdigest()

def check_staleness(
    factor: Optional[SparseFactor],
    mesh: TetMesh,
    material: MaterialField,
    h: float,
    partition: Optional[DofPartition] = None
) -> bool:
    """True iff there is no factor or its signature differs from the current system."""
    if factor is None:
        return True
    return factor.signature != compute_signature(mesh, material, h, partition)

class FactorManager:
    """
    Owns the global operator, its factor and the refactorization policy for one mesh.

    ``ensure`` rebuilds only when the signature changes, or on every call when
    ``reuse`` is False; ``refactorization_count`` counts the factorizations performed so far.
    """
    def __init__(self, mesh: TetMesh, partition: DofPartition, reuse: bool = True):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.mesh = mesh
        self.partition = partition
        self.reuse = reuse
        self.factor: Optional[SparseFactor] = None
        self.full_operator: Optional[sp.csr_matrix] = None
        self.coupling: Optional[sp.csr_matrix] = None
        self.damping: Optional[sp.csr_matrix] = None
        self.refactorization_count = 0

    def ensure(self, material: MaterialField, h: float) -> SparseFactor:
        if self.reuse and not check_staleness(self.factor, self.mesh, material, h, self.partition):
            return self.factor

        signature = compute_signature(self.mesh, material, h, self.partition)
        full = assemble_global(self.mesh, material, h)
        a_ff, a_fd = restrict(full, self.partition)

        self.factor = factorize(a_ff, signature=signature)
        self.full_operator = full
        self.coupling = a_fd
        self.damping = assemble_damping(self.mesh, material)
        self.refactorization_count += 1
        self.logger.info(f"Refactorization #{self.refactorization_count} "
                         f"(material {material.version[:8]}, h={h:g}, {self.partition.num_free} free vertices)")
        return self.factor

    def current(self, material: MaterialField, h: float) -> SparseFactor:
        """Returns the factor, refusing to hand out one built for another system."""
        if check_staleness(self.factor, self.mesh, material, h, self.partition):
            raise StaleFactorError("The stored factor does not match the current material or time step.")
        return self.factor

    def dirichlet_load(self) -> np.ndarray:
        """(A_fd q_d) on free vertices, to subtract from the free right-hand side."""
        if self.coupling is None:
            raise StaleFactorError("No operator has been assembled yet.")
        if self.partition.fixed.size == 0:
            return np.zeros((self.partition.num_free, 3))
        return self.coupling @ self.partition.prescribed
