import numpy as np
import scipy.linalg
from core.factor.exceptions import NotPositiveDefiniteError

DENSE_LIMIT = 500

def dense_inverse(matrix: np.ndarray) -> np.ndarray:
    """
    Inverse of a small SPD matrix by Cholesky.

    Raises:
        ValueError: If the matrix is not square or larger than DENSE_LIMIT.
        NotPositiveDefiniteError: If the Cholesky factorization fails.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}.")
    if matrix.shape[0] > DENSE_LIMIT:
        raise ValueError(f"Dense inverse is limited to n <= {DENSE_LIMIT}, got {matrix.shape[0]}.")

    try:
        factor = scipy.linalg.cho_factor(matrix, lower=True)
    except scipy.linalg.LinAlgError:
        eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
        worst = int(np.argmin(eigenvalues))
        raise NotPositiveDefiniteError(worst, float(eigenvalues[worst]), "Dense matrix is not positive definite")
    return scipy.linalg.cho_solve(factor, np.eye(matrix.shape[0]))

def dense_operator(scalar_block) -> np.ndarray:
    """Expands a scalar n x n block (sparse or dense) to the 3n x 3n operator in vertex-major DoF order."""
    block = scalar_block.toarray() if hasattr(scalar_block, "toarray") else np.asarray(scalar_block, dtype=float)
    return np.kron(block, np.eye(3))
