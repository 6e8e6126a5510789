from dataclasses import dataclass
from typing import Tuple
import numpy as np
import scipy.sparse as sp
from .sparse_factor import SparseFactor

@dataclass(frozen=True)
class DelassusBlock:
    """
    Contact compliance W = J A^-1 J^T and the cached columns a_c = A^-1 j_c.

    ``columns`` has shape (K, n, 3): column c as a per-vertex displacement field.
    """
    matrix: np.ndarray
    columns: np.ndarray

def split_axes(jacobian: np.ndarray) -> Tuple[sp.csc_matrix, sp.csc_matrix, sp.csc_matrix]:
    """
    Splits a (K, n, 3) contact Jacobian into three scalar (n, K) blocks J_x^T, J_y^T, J_z^T.

    Each row is supported on a single vertex, so each block keeps one entry per row.
    """
    return tuple(sp.csc_matrix(jacobian[:, :, axis].T) for axis in range(3))

def delassus(factor: SparseFactor, jacobian: np.ndarray) -> DelassusBlock:
    """
    Batched Delassus assembly from the sparse inverse factor.

    Args:
        factor: Scalar-block factor over the free vertices.
        jacobian: (K, n_free, 3) constraint rows in per-vertex form.

    Returns:
        DelassusBlock: W = sum_axis Y_a^T Y_a with Y_a = S J_a^T, and a_c from S^T Y_a.
    """
    jacobian = np.asarray(jacobian, dtype=float)
    num_rows = jacobian.shape[0]
    n = factor.size

    if num_rows == 0:
        return DelassusBlock(matrix=np.zeros((0, 0)), columns=np.zeros((0, n, 3)))

    if jacobian.shape[1] != n:
        raise ValueError(f"Contact Jacobian spans {jacobian.shape[1]} vertices, factor has {n}.")

    matrix = np.zeros((num_rows, num_rows))
    columns = np.empty((num_rows, n, 3))

    for axis, block in enumerate(split_axes(jacobian)):
        y = factor.s_factor @ block
        y = y.toarray() if sp.issparse(y) else np.asarray(y)
        matrix += y.T @ y
        columns[:, :, axis] = (factor.s_transpose @ y).T

    matrix = 0.5 * (matrix + matrix.T)
    matrix.setflags(write=False)
    columns.setflags(write=False)
    return DelassusBlock(matrix=matrix, columns=columns)
