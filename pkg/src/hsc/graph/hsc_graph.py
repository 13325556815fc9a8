from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict

import numpy as np
import scipy.sparse as sp

from hsc.meshio.hsc_mesh import HscMesh


@dataclass(frozen=True)
class HscAdjacencyGraph:
    """Undirected, unweighted vertex graph. `edges` is an (e, 2) array of
    pairs with i < j, sorted lexicographically, each pair once."""

    n: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 matrix W with sorted column indices per row."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.n_edges)
        matrix = sp.csr_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(self.n, self.n),
        )
        matrix.sort_indices()
        return matrix

    def neighbors(self, vertex: int) -> np.ndarray:
        """Neighbours of `vertex` in ascending index order."""
        w = self.adjacency
        return w.indices[w.indptr[vertex] : w.indptr[vertex + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__, n=self.n, n_edges=self.n_edges
        )


def graph_from_edges(n: int, pairs: np.ndarray) -> HscAdjacencyGraph:
    """Deduplicate and orient (i < j) an arbitrary list of vertex pairs."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if pairs.size == 0:
        return HscAdjacencyGraph(n, pairs)
    pairs = np.sort(pairs, axis=1)
    pairs = np.unique(pairs, axis=0)
    return HscAdjacencyGraph(n, pairs)


def build_adjacency_from_faces(n: int, faces: np.ndarray) -> HscAdjacencyGraph:
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    pairs = np.concatenate(
        [faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]
    )
    return graph_from_edges(n, pairs)


def build_adjacency(mesh: HscMesh) -> HscAdjacencyGraph:
    return build_adjacency_from_faces(mesh.n_vertices, mesh.faces)


def cycle_graph(n: int) -> HscAdjacencyGraph:
    """Closed chain 0 - 1 - ... - (n-1) - 0, the graph of a sampled closed
    curve."""
    index = np.arange(n)
    return graph_from_edges(n, np.stack([index, (index + 1) % n], axis=1))


def path_graph(n: int) -> HscAdjacencyGraph:
    index = np.arange(n - 1)
    return graph_from_edges(n, np.stack([index, index + 1], axis=1))


def combinatorial_laplacian(graph: HscAdjacencyGraph) -> sp.csr_matrix:
    """L = A - W with unit edge weights: L_ii is the valence of i and
    L_ij = -1 exactly when (i, j) is an edge."""
    w = graph.adjacency
    laplacian = (
        sp.diags(
            graph.degrees().astype(np.float64), 0, shape=(graph.n, graph.n)
        )
        - w
    )
    laplacian = sp.csr_matrix(laplacian)
    laplacian.sort_indices()
    return laplacian
