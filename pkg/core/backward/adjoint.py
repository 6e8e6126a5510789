import logging
from dataclasses import dataclass
from typing import Optional, Tuple
import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla
from core.factor.sparse_factor import SparseFactor
from core.contact.contact_set import ContactSet
from core.contact.contact_solver import ContactSolution
from core.contact.exceptions import SingularContactSystemError
from .local_jacobian import FreeLocalJacobian
from .exceptions import AdjointDivergedError

GMRES_RESTART = 50
GMRES_ACCEPTANCE = 100.0
DIVERGENCE_FACTOR = 1e6

@dataclass(frozen=True)
class ContactLinearization:
    """
    Contact rows frozen at the converged multipliers, in flattened free-DoF form.

    Residual rows read omega J q - E Lambda_q q + E (I - Lambda_lambda) lambda, so that
    C = Omega J - E Lambda_q and D = E (I - Lambda_lambda); forces enter the momentum rows
    as B lambda with B = J^T Omega_hat.
    """
    jacobian: np.ndarray
    omega: np.ndarray
    regularizer: np.ndarray
    force_weight: np.ndarray
    lambda_q: np.ndarray
    lambda_lambda: np.ndarray

    @property
    def num_rows(self) -> int:
        return self.jacobian.shape[0]

    @property
    def c_matrix(self) -> np.ndarray:
        return self.omega[:, None] * self.jacobian - self.regularizer[:, None] * self.lambda_q

    @property
    def d_matrix(self) -> np.ndarray:
        return self.regularizer[:, None] * (np.eye(self.num_rows) - self.lambda_lambda)

def linearize_contacts(contact_set: ContactSet, solution: ContactSolution, jacobian: np.ndarray) -> ContactLinearization:
    """
    Builds the frozen contact linearization of a converged step.

    Sliding pairs (slip s != 0) target lambda_hat = -mu lambda_n s/|s|, whose derivatives are
    -mu lambda_n (I - s_hat s_hat^T) / |s| J_f in q and -mu s_hat in lambda_n; sticking pairs
    target their own multipliers.
    """
    num_rows = contact_set.num_rows
    flat = np.asarray(jacobian, dtype=float).reshape(num_rows, -1)
    lambda_q = np.zeros_like(flat)
    lambda_lambda = np.zeros((num_rows, num_rows))

    if contact_set.num_friction:
        start = contact_set.friction_slice().start
        for pair, contact in enumerate(contact_set.frictional.tolist()):
            rows = slice(start + 2 * pair, start + 2 * pair + 2)
            slip = solution.slip[pair]
            magnitude = float(np.linalg.norm(slip))
            if magnitude == 0.0:
                lambda_lambda[rows, rows] = np.eye(2)
                continue
            direction = slip / magnitude
            mu = contact_set.friction[contact]
            normal = solution.multipliers[contact]
            projector = (np.eye(2) - np.outer(direction, direction)) / magnitude
            lambda_q[rows] = -mu * normal * projector @ flat[rows]
            lambda_lambda[rows, contact] = -mu * direction

    return ContactLinearization(
        jacobian=flat,
        omega=np.asarray(solution.omega, dtype=float),
        regularizer=np.asarray(solution.regularizer, dtype=float),
        force_weight=np.asarray(solution.force_weight, dtype=float),
        lambda_q=lambda_q,
        lambda_lambda=lambda_lambda,
    )

@dataclass(frozen=True)
class AdjointSolution:
    """Backbone adjoint mu = A^-1 y_q on free vertices plus the contact-row adjoint nu."""
    mu: np.ndarray
    y_q: np.ndarray
    nu: np.ndarray
    iterations: int
    residual: float
    used_gmres: bool

class AdjointSolver:
    """
    Solves (A - db/dq)^T mu = rhs on free vertices through the persistent factor.

    The fixed-point iteration y <- rhs + (db/dq)^T A^-1 y runs first; if it stalls or
    reaches its cap, GMRES on the same operator (preconditioned by A^-1) takes over.
    Contacts border the system and are eliminated by a Schur complement over the rows.
    """
    def __init__(self, max_iterations: int = 500, tolerance: float = 1e-10):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.gmres_fallbacks = 0

    def _iterate(self, factor: SparseFactor, local: FreeLocalJacobian, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int, float]:
        scale = float(np.linalg.norm(rhs))
        y = rhs.copy()
        mu = factor.apply_inverse(y)
        residual = np.inf

        for iteration in range(1, self.max_iterations + 1):
            y_next = rhs + local.rmatvec(mu)
            residual = float(np.linalg.norm(y_next - y)) / scale
            y = y_next
            mu = factor.apply_inverse(y)
            if residual <= self.tolerance:
                return mu, y, iteration, residual
            if not np.isfinite(residual) or residual > DIVERGENCE_FACTOR:
                break

        return mu, y, self.max_iterations, residual

    def _gmres(self, factor: SparseFactor, local: FreeLocalJacobian, rhs: np.ndarray) -> Tuple[np.ndarray, float]:
        shape = rhs.shape
        size = rhs.size

        def matvec(x):
            field = x.reshape(shape)
            return (factor.operator @ field - local.rmatvec(field)).ravel()

        def precondition(x):
            return factor.apply_inverse(x.reshape(shape)).ravel()

        operator = spla.LinearOperator((size, size), matvec=matvec, dtype=float)
        preconditioner = spla.LinearOperator((size, size), matvec=precondition, dtype=float)
        solution, _ = spla.gmres(operator, rhs.ravel(), M=preconditioner, rtol=self.tolerance, atol=0.0,
                                 restart=min(size, GMRES_RESTART), maxiter=self.max_iterations)
        residual = float(np.linalg.norm(rhs.ravel() - matvec(solution)) / np.linalg.norm(rhs))
        return solution.reshape(shape), residual

    def backbone(self, factor: SparseFactor, local: FreeLocalJacobian, rhs: np.ndarray,
                 frame: int = 0) -> Tuple[np.ndarray, np.ndarray, int, float, bool]:
        """
        Returns:
            Tuple: (mu, y = A mu, iterations, relative residual, whether GMRES was needed).

        Raises:
            AdjointDivergedError: If GMRES also misses the tolerance.
        """
        rhs = np.asarray(rhs, dtype=float)
        if not np.any(rhs):
            return np.zeros_like(rhs), np.zeros_like(rhs), 0, 0.0, False

        mu, y, iterations, residual = self._iterate(factor, local, rhs)
        if residual <= self.tolerance:
            return mu, y, iterations, residual, False

        self.gmres_fallbacks += 1
        self.logger.warning(f"Frame {frame}: adjoint iteration stalled at {residual:.3e}; falling back to GMRES")
        mu, gmres_residual = self._gmres(factor, local, rhs)
        if not gmres_residual <= GMRES_ACCEPTANCE * self.tolerance:
            self.logger.error(f"Frame {frame}: GMRES adjoint residual {gmres_residual:.3e}")
            raise AdjointDivergedError(frame, gmres_residual, iterations)
        return mu, factor.operator @ mu, iterations, gmres_residual, True

    def solve(
        self,
        factor: SparseFactor,
        local: FreeLocalJacobian,
        seed: np.ndarray,
        contacts: Optional[ContactLinearization] = None,
        frame: int = 0
    ) -> AdjointSolution:
        """
        Adjoint of one converged step.

        Without contacts mu solves H^T mu = seed with H = A - db/dq. With contacts the bordered
        system [H^T C^T; -B^T D^T][mu; nu] = [seed; 0] is reduced to
        (D^T + B^T H^-T C^T) nu = B^T H^-T seed and mu = H^-T (seed - C^T nu).

        Args:
            factor: Factor of A over free vertices.
            local: db/dq restricted to free vertices.
            seed: (n_free, 3) incoming position adjoint.
            contacts: Frozen contact rows, or None on the fast path.
            frame: Frame index for error reporting.
        """
        seed = np.asarray(seed, dtype=float)
        mu, y, iterations, residual, used_gmres = self.backbone(factor, local, seed, frame)

        if contacts is None or contacts.num_rows == 0:
            return AdjointSolution(mu=mu, y_q=y, nu=np.zeros(0), iterations=iterations, residual=residual,
                                   used_gmres=used_gmres)

        c_matrix = contacts.c_matrix
        columns = np.empty((c_matrix.shape[1], contacts.num_rows))
        for row in range(contacts.num_rows):
            solved, _, count, _, fallback = self.backbone(factor, local, c_matrix[row].reshape(seed.shape), frame)
            columns[:, row] = solved.ravel()
            iterations += count
            used_gmres |= fallback

        weighted = contacts.force_weight[:, None] * contacts.jacobian
        schur = contacts.d_matrix.T + weighted @ columns
        try:
            nu = scipy.linalg.solve(schur, weighted @ mu.ravel())
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise SingularContactSystemError(contacts.num_rows, e)

        mu = mu - (columns @ nu).reshape(seed.shape)
        return AdjointSolution(mu=mu, y_q=factor.operator @ mu, nu=nu, iterations=iterations, residual=residual,
                               used_gmres=used_gmres)
