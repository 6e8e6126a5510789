import logging
from dataclasses import dataclass
from typing import Optional
import numpy as np
import scipy.linalg
from core.factor.delassus import DelassusBlock
from .contact_set import ContactSet
from .fischer_burmeister import fb_residual, ncp_weights, project_cone
from .exceptions import SingularContactSystemError

LIFT_FRACTION = 1e-10

@dataclass(frozen=True)
class ContactSolution:
    """
    Converged multipliers with the linearization they were solved under.

    ``omega``/``regularizer`` are the row weights, ``force_weight`` scales each multiplier in
    the position update (the normal weight on normal rows, 1 elsewhere). ``lambda_hat`` is the
    sliding target of friction rows and ``slip`` the tangential displacement of each pair.
    """
    multipliers: np.ndarray
    omega: np.ndarray
    regularizer: np.ndarray
    force_weight: np.ndarray
    lambda_hat: np.ndarray
    slip: np.ndarray
    compliance: np.ndarray
    positions: np.ndarray
    iterations: int
    residual: float

    def forces(self) -> np.ndarray:
        return self.force_weight * self.multipliers

def compliance_scales(contact_set: ContactSet, delassus: np.ndarray, h: float) -> np.ndarray:
    """r = h^2 W_cc per row; both rows of a friction pair share the mean of their diagonals."""
    r = h ** 2 * np.diag(delassus).copy()
    friction = contact_set.friction_slice()
    if contact_set.num_friction:
        pairs = r[friction].reshape(-1, 2).mean(axis=1)
        r[friction] = np.repeat(pairs, 2)
    return r

def position_update(base: np.ndarray, block: DelassusBlock, forces: np.ndarray) -> np.ndarray:
    """q = A^-1 b + sum_c f_c a_c with the cached columns a_c = A^-1 j_c."""
    if forces.size == 0:
        return base.copy()
    return base + np.einsum('k,kvi->vi', forces, block.columns)

class ContactSolver:
    """
    Reduced multiplier solve for the contact rows of one PD iteration.

    Each inner iteration freezes the Fischer-Burmeister weights at the current multipliers,
    solves the dense K x K system (Omega W Omega_hat + E) lambda = rhs and projects the result
    onto the admissible set. Friction pairs enter that system with stick weights (1, 0); the
    radial cone projection decides sliding, and the Fischer-Burmeister friction weights are
    evaluated once at the converged multipliers for the backward pass.
    """
    def __init__(self, inner_iterations: int = 20, tolerance: float = 1e-10):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.inner_iterations = inner_iterations
        self.tolerance = tolerance

    def _linearize(self, contact_set: ContactSet, row_values: np.ndarray, start_values: np.ndarray,
                   multipliers: np.ndarray, r: np.ndarray):
        num_rows = contact_set.num_rows
        omega = np.ones(num_rows)
        regularizer = np.zeros(num_rows)
        force_weight = np.ones(num_rows)
        lambda_hat = multipliers.copy()
        targets = contact_set.targets()

        normals = contact_set.normal_slice()
        gaps = row_values[normals] - targets[normals]
        omega[normals], regularizer[normals] = ncp_weights(gaps, r[normals], multipliers[normals])
        force_weight[normals] = omega[normals]

        slip = np.zeros((contact_set.num_friction // 2, 2))
        if contact_set.num_friction:
            friction = contact_set.friction_slice()
            slip = (row_values[friction] - start_values[friction]).reshape(-1, 2)
            pairs = multipliers[friction].reshape(-1, 2)
            mu = contact_set.friction[contact_set.frictional]
            normal_multipliers = multipliers[normals][contact_set.frictional]
            magnitude = np.linalg.norm(slip, axis=1)
            slack = mu * normal_multipliers - np.linalg.norm(pairs, axis=1)
            pair_omega, pair_regularizer = ncp_weights(magnitude, r[friction][::2], slack)
            omega[friction] = np.repeat(pair_omega, 2)
            regularizer[friction] = np.repeat(pair_regularizer, 2)

            sliding = magnitude > 0
            direction = np.where(sliding[:, None], slip / np.where(sliding, magnitude, 1.0)[:, None], 0.0)
            hat = np.where(sliding[:, None], -(mu * normal_multipliers)[:, None] * direction, pairs)
            lambda_hat[friction] = hat.ravel()

        return omega, regularizer, force_weight, lambda_hat, slip

    def _solve_dense(self, matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        # Each row is lifted against its own diagonal; friction and normal rows differ by h^-2 in scale.
        lift = LIFT_FRACTION * np.maximum(np.abs(np.diag(matrix)), 1e-300)
        lifted = matrix + np.diag(lift)
        symmetric = np.allclose(lifted, lifted.T, rtol=1e-12, atol=0.0)
        try:
            return scipy.linalg.solve(lifted, rhs, assume_a='sym' if symmetric else 'gen')
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise SingularContactSystemError(matrix.shape[0], e)

    def solve(
        self,
        contact_set: ContactSet,
        block: DelassusBlock,
        jacobian: np.ndarray,
        unconstrained: np.ndarray,
        start_positions: np.ndarray,
        h: float,
        initial: Optional[np.ndarray] = None
    ) -> ContactSolution:
        """
        Solves for multipliers given the contact-free global solution.

        Args:
            contact_set: Rows for this step.
            block: Delassus matrix and cached columns over free vertices.
            jacobian: (K, n_free, 3) constraint rows.
            unconstrained: (n_free, 3) A^-1 b without contact forces.
            start_positions: (n_free, 3) positions at the start of the step (friction reference).
            h: Time step.
            initial: Warm-start multipliers.

        Returns:
            ContactSolution: Multipliers, weights and the corrected free positions.
        """
        num_rows = contact_set.num_rows
        if num_rows == 0:
            empty = np.zeros(0)
            return ContactSolution(empty, empty, empty, empty, empty, np.zeros((0, 2)), empty,
                                   unconstrained.copy(), 0, 0.0)

        delassus = block.matrix
        r = compliance_scales(contact_set, delassus, h)
        base_values = np.einsum('kvi,vi->k', jacobian, unconstrained)
        start_values = np.einsum('kvi,vi->k', jacobian, start_positions)
        targets = contact_set.targets()
        friction = contact_set.friction_slice()
        if contact_set.num_friction:
            targets = targets.copy()
            targets[friction] = start_values[friction]

        multipliers = np.zeros(num_rows) if initial is None else np.array(initial, dtype=float)
        force_weight = np.ones(num_rows)
        change = np.inf
        iteration = 0

        for iteration in range(1, self.inner_iterations + 1):
            row_values = base_values + delassus @ (force_weight * multipliers)
            omega, regularizer, force_weight, _, _ = self._linearize(
                contact_set, row_values, start_values, multipliers, r)

            # Friction rows are solved as stick trials; the cone projection turns them into sliding.
            omega[friction] = 1.0
            regularizer[friction] = 0.0
            matrix = omega[:, None] * delassus * force_weight[None, :] + np.diag(regularizer)
            rhs = omega * (targets - base_values)
            updated = self._solve_dense(matrix, rhs)
            updated = self._project(contact_set, updated)

            change = np.linalg.norm(updated - multipliers) / max(1.0, np.linalg.norm(updated))
            multipliers = updated
            if change <= self.tolerance:
                break

        row_values = base_values + delassus @ (force_weight * multipliers)
        omega, regularizer, force_weight, lambda_hat, slip = self._linearize(
            contact_set, row_values, start_values, multipliers, r)
        forces = force_weight * multipliers
        positions = position_update(unconstrained, block, forces)
        residual = self.complementarity_residual(contact_set, row_values, r, multipliers)

        if change > self.tolerance:
            self.logger.debug(f"Contact solve stopped after {iteration} iterations (change {change:.3e})")

        return ContactSolution(
            multipliers=multipliers,
            omega=omega,
            regularizer=regularizer,
            force_weight=force_weight,
            lambda_hat=lambda_hat,
            slip=slip,
            compliance=r,
            positions=positions,
            iterations=iteration,
            residual=residual,
        )

    def _project(self, contact_set: ContactSet, multipliers: np.ndarray) -> np.ndarray:
        projected = multipliers.copy()
        normals = contact_set.normal_slice()
        projected[normals] = np.maximum(projected[normals], 0.0)
        if contact_set.num_friction:
            friction = contact_set.friction_slice()
            pairs = projected[friction].reshape(-1, 2)
            _, pairs = project_cone(projected[normals][contact_set.frictional], pairs,
                                    contact_set.friction[contact_set.frictional])
            projected[friction] = pairs.ravel()
        return projected

    @staticmethod
    def complementarity_residual(contact_set: ContactSet, row_values: np.ndarray, r: np.ndarray,
                                 multipliers: np.ndarray) -> float:
        normals = contact_set.normal_slice()
        if contact_set.num_normal == 0:
            return 0.0
        gaps = row_values[normals] - contact_set.offsets
        return float(np.max(np.abs(fb_residual(gaps, r[normals], multipliers[normals]))))
