import logging, time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import numpy as np
import scipy.sparse as sp
from utils.threads import worker_count
from .ordering import fill_reducing_ordering
from .exceptions import NotPositiveDefiniteError

logger = logging.getLogger(__name__)

@dataclass
class SparseFactor:
    """
    Sparse inverse factor with A^-1 = S^T S, S = D^{-1/2} L^{-1} P.

    Stores a single scalar block; (n, 3) right-hand sides are applied per axis.
    """
    permutation: np.ndarray
    s_factor: sp.csr_matrix = field(repr=False)
    s_transpose: sp.csr_matrix = field(repr=False)
    signature: str
    nnz_ratio: float
    ordering: str
    operator: sp.csr_matrix = field(repr=False)
    elimination_parent: np.ndarray = field(repr=False)
    factor_seconds: float = 0.0
    matvec_count: int = 0

    @property
    def size(self) -> int:
        return self.s_factor.shape[0]

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.size:
            raise ValueError(f"Dimension mismatch: factor has {self.size} rows, vector has {v.shape[0]}.")
        return v

    def apply_inverse(self, v: np.ndarray) -> np.ndarray:
        """A^-1 v as two sparse products S^T (S v)."""
        v = self._check(v)
        return self.s_transpose @ (self.s_factor @ v)

    def multiply(self, v: np.ndarray) -> np.ndarray:
        """A v through the stored operator; every call is counted."""
        v = self._check(v)
        self.matvec_count += 1
        return self.operator @ v

def apply_inverse(factor: SparseFactor, v: np.ndarray) -> np.ndarray:
    return factor.apply_inverse(v)

def elimination_tree(upper: sp.csc_matrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Elimination tree and column counts of L from the upper triangle (column k holds A[i, k], i < k).

    Returns:
        Tuple: (parent, column_counts) with parent[k] = -1 at roots.
    """
    n = upper.shape[0]
    indptr, indices = upper.indptr, upper.indices
    parent = np.full(n, -1, dtype=np.int64)
    flag = np.full(n, -1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)

    for k in range(n):
        flag[k] = k
        for i in indices[indptr[k]:indptr[k + 1]]:
            if i >= k:
                continue
            while flag[i] != k:
                if parent[i] == -1:
                    parent[i] = k
                counts[i] += 1
                flag[i] = k
                i = parent[i]

    return parent, counts

def ldl_numeric(upper: sp.csc_matrix, parent: np.ndarray, counts: np.ndarray) -> Tuple[sp.csc_matrix, np.ndarray]:
    """
    Up-looking LDL^T: row k of L is found from the elimination-tree reach of column k.

    Returns:
        Tuple: (L strictly lower in CSC, D).

    Raises:
        NotPositiveDefiniteError: On a pivot d_k <= 0.
    """
    n = upper.shape[0]
    indptr, indices, data = upper.indptr, upper.indices, upper.data
    lp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=lp[1:])
    li = np.zeros(lp[-1], dtype=np.int64)
    lx = np.zeros(lp[-1])
    lnz = np.zeros(n, dtype=np.int64)

    y = np.zeros(n)
    d = np.zeros(n)
    flag = np.full(n, -1, dtype=np.int64)
    pattern = np.zeros(n, dtype=np.int64)

    for k in range(n):
        top = n
        flag[k] = k
        for p in range(indptr[k], indptr[k + 1]):
            i = indices[p]
            if i > k:
                continue
            y[i] += data[p]
            length = 0
            while flag[i] != k:
                pattern[length] = i
                length += 1
                flag[i] = k
                i = parent[i]
            while length > 0:
                top -= 1
                length -= 1
                pattern[top] = pattern[length]

        d[k] = y[k]
        y[k] = 0.0

        for i in pattern[top:n]:
            yi = y[i]
            y[i] = 0.0
            start, stop = lp[i], lp[i] + lnz[i]
            y[li[start:stop]] -= lx[start:stop] * yi
            l_ki = yi / d[i]
            d[k] -= l_ki * yi
            li[stop] = k
            lx[stop] = l_ki
            lnz[i] += 1

        if not d[k] > 0.0:
            raise NotPositiveDefiniteError(k, float(d[k]))

    lower = sp.csc_matrix((lx, li, lp), shape=(n, n))
    return lower, d

def _inverse_columns(
    columns: np.ndarray,
    lower: sp.csc_matrix,
    parent: np.ndarray,
    scale: np.ndarray,
    permutation: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = lower.shape[0]
    lp, li, lx = lower.indptr, lower.indices, lower.data
    position = np.full(n, -1, dtype=np.int64)
    rows: List[np.ndarray] = []
    values: List[np.ndarray] = []
    cols: List[np.ndarray] = []

    for k in columns:
        path = []
        node = k
        while node != -1:
            path.append(node)
            node = parent[node]
        path = np.array(path, dtype=np.int64)
        position[path] = np.arange(path.size)

        x = np.zeros(path.size)
        x[0] = 1.0
        for local, node in enumerate(path):
            xi = x[local]
            if xi == 0.0:
                continue
            start, stop = lp[node], lp[node + 1]
            x[position[li[start:stop]]] -= lx[start:stop] * xi

        position[path] = -1
        keep = x != 0.0
        rows.append(path[keep])
        values.append(x[keep] * scale[path[keep]])
        cols.append(np.full(int(keep.sum()), permutation[k], dtype=np.int64))

    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, np.zeros(0), empty
    return np.concatenate(rows), np.concatenate(values), np.concatenate(cols)

def build_inverse_factor(
    lower: sp.csc_matrix,
    d: np.ndarray,
    parent: np.ndarray,
    permutation: np.ndarray,
    workers: Optional[int] = None
) -> sp.csr_matrix:
    """
    S = D^{-1/2} L^{-1} P column by column.

    Column k of L^{-1} is supported on k and its elimination-tree ancestors, so columns are
    independent and split into contiguous chunks across a thread pool. Chunks are merged in
    column order.
    """
    n = lower.shape[0]
    workers = workers or worker_count()
    scale = 1.0 / np.sqrt(d)
    chunks = [chunk for chunk in np.array_split(np.arange(n), max(1, min(workers, n))) if chunk.size]

    if len(chunks) <= 1:
        parts = [_inverse_columns(chunk, lower, parent, scale, permutation) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
            parts = list(executor.map(lambda chunk: _inverse_columns(chunk, lower, parent, scale, permutation), chunks))

    rows = np.concatenate([part[0] for part in parts]) if parts else np.zeros(0, dtype=np.int64)
    values = np.concatenate([part[1] for part in parts]) if parts else np.zeros(0)
    cols = np.concatenate([part[2] for part in parts]) if parts else np.zeros(0, dtype=np.int64)

    s_factor = sp.coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr()
    s_factor.sort_indices()
    return s_factor

def factorize(matrix: sp.spmatrix, signature: str = "", workers: Optional[int] = None) -> SparseFactor:
    """
    Factorizes an SPD matrix into its sparse inverse factor.

    Args:
        matrix: Symmetric positive definite (n, n) sparse matrix.
        signature: Refactorization fingerprint stored with the factor.
        workers: Thread count for the S column construction; defaults to ``worker_count()``.

    Returns:
        SparseFactor: Factor with A^-1 = S^T S.

    Raises:
        NotPositiveDefiniteError: If a pivot is not strictly positive.
    """
    started = time.perf_counter()
    operator = sp.csr_matrix(matrix, dtype=float)
    operator.sort_indices()
    n = operator.shape[0]

    ordering = fill_reducing_ordering(operator)
    permutation = ordering.permutation
    permuted = operator[permutation][:, permutation]
    upper = sp.triu(permuted, format="csc")
    upper.sort_indices()

    parent, counts = elimination_tree(upper)
    lower, d = ldl_numeric(upper, parent, counts)
    s_factor = build_inverse_factor(lower, d, parent, permutation, workers)
    s_transpose = s_factor.T.tocsr()
    s_transpose.sort_indices()

    elapsed = time.perf_counter() - started
    nnz_ratio = s_factor.nnz / float(n * n) if n else 0.0
    logger.info(f"Factorized {n}x{n} operator ({ordering.method}): nnz(A)={operator.nnz}, nnz(S)={s_factor.nnz}, "
                f"ratio={nnz_ratio:.4f}, {elapsed:.3f}s")

    for array in (permutation, parent):
        array.setflags(write=False)

    return SparseFactor(
        permutation=permutation,
        s_factor=s_factor,
        s_transpose=s_transpose,
        signature=signature,
        nnz_ratio=nnz_ratio,
        ordering=ordering.method,
        operator=operator,
        elimination_parent=parent,
        factor_seconds=elapsed,
    )
