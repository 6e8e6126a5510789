import heapq, logging
from dataclasses import dataclass
from typing import List
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

LEAF_SIZE = 32

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Ordering:
    permutation: np.ndarray
    method: str

def _adjacency(matrix: sp.spmatrix) -> sp.csr_matrix:
    graph = sp.csr_matrix(matrix, copy=True)
    graph.setdiag(0)
    graph.eliminate_zeros()
    graph.data = np.ones_like(graph.data)
    return ((graph + graph.T) > 0).astype(np.int8).tocsr()

def minimum_degree(graph: sp.csr_matrix) -> np.ndarray:
    """
    Greedy minimum-degree elimination on the quotient-free adjacency structure.

    Ties are broken by the smallest vertex index, so the result is deterministic.
    """
    n = graph.shape[0]
    neighbors = [set(graph.indices[graph.indptr[i]:graph.indptr[i + 1]].tolist()) - {i} for i in range(n)]
    heap = [(len(neighbors[i]), i) for i in range(n)]
    heapq.heapify(heap)
    eliminated = np.zeros(n, dtype=bool)
    order: List[int] = []

    while heap:
        degree, vertex = heapq.heappop(heap)
        if eliminated[vertex] or degree != len(neighbors[vertex]):
            continue

        eliminated[vertex] = True
        order.append(vertex)
        clique = neighbors[vertex]

        for other in clique:
            neighbors[other] |= clique
            neighbors[other].discard(other)
            neighbors[other].discard(vertex)
            heapq.heappush(heap, (len(neighbors[other]), other))

        neighbors[vertex] = set()

    return np.array(order, dtype=np.int64)

def _pseudo_peripheral(graph: sp.csr_matrix) -> tuple:
    start, best_depth = 0, -1
    distances = None

    for _ in range(4):
        distances = shortest_path(graph, unweighted=True, indices=start, directed=False)
        depth = int(distances.max())
        if depth <= best_depth:
            break
        best_depth = depth
        frontier = np.flatnonzero(distances == depth)
        degrees = np.diff(graph.indptr)[frontier]
        start = int(frontier[np.argmin(degrees)])

    return start, distances.astype(np.int64)

class _Dissector:
    def __init__(self, leaf_size: int):
        self.leaf_size = leaf_size
        self.splits = 0

    def order(self, graph: sp.csr_matrix, nodes: np.ndarray) -> np.ndarray:
        if nodes.size <= self.leaf_size:
            return nodes[minimum_degree(graph)]

        count, labels = connected_components(graph, directed=False)
        if count > 1:
            parts = [np.flatnonzero(labels == label) for label in range(count)]
            return np.concatenate([self.order(graph[part][:, part].tocsr(), nodes[part]) for part in parts])

        _, levels = _pseudo_peripheral(graph)
        depth = levels.max()
        if depth < 2:
            return nodes[minimum_degree(graph)]

        sizes = np.bincount(levels, minlength=depth + 1)
        middle = int(np.searchsorted(np.cumsum(sizes), nodes.size / 2.0))
        middle = min(max(middle, 1), depth - 1)

        left = np.flatnonzero(levels < middle)
        right = np.flatnonzero(levels > middle)
        separator = np.flatnonzero(levels == middle)
        if left.size == 0 or right.size == 0:
            return nodes[minimum_degree(graph)]

        self.splits += 1
        return np.concatenate([
            self.order(graph[left][:, left].tocsr(), nodes[left]),
            self.order(graph[right][:, right].tocsr(), nodes[right]),
            nodes[separator],
        ])

def fill_reducing_ordering(matrix: sp.spmatrix, leaf_size: int = LEAF_SIZE) -> Ordering:
    """
    Nested dissection by recursive BFS level-set bisection.

    A level set of a breadth-first search separates the levels on either side of it, so
    each bisection places the middle level last. Small or non-separable parts are ordered
    by minimum degree.

    Args:
        matrix: Symmetric sparse matrix; only its pattern is used.
        leaf_size: Parts at or below this many vertices are not dissected further.

    Returns:
        Ordering: ``permutation[k]`` is the original index eliminated k-th.
    """
    graph = _adjacency(matrix)
    n = graph.shape[0]
    if n == 0:
        return Ordering(np.zeros(0, dtype=np.int64), "natural")

    dissector = _Dissector(leaf_size)
    permutation = dissector.order(graph, np.arange(n))
    method = "nested_dissection" if dissector.splits else "minimum_degree"
    logger.debug(f"Ordering of {n} vertices: {method} with {dissector.splits} separators")
    return Ordering(permutation.astype(np.int64), method)
