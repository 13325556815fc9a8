"""
# Reconstruction error

The visual metric combines displacement with a geometric Laplacian term:

    GL(p_i) = p_i - (sum_j p_j / l_ij) / (sum_j 1 / l_ij)

over the one-ring of i, with l_ij the edge length measured on the mesh being
evaluated. Per vertex,

    e_i = (||p_i - q_i|| + ||GL(p_i) - GL(q_i)||) / (2 n),

and the global error is sum_i e_i divided by the ORIGINAL mesh's surface
area. Both normalizations are applied; `raw_sum` keeps the sum before the
area division.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import scipy.sparse as sp

from hsc.error import HscConnectivityError, HscNumericalError, HscUsageError
from hsc.graph.hsc_graph import HscAdjacencyGraph, build_adjacency
from hsc.meshio.hsc_mesh import HscMesh, surface_area

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HscErrorReport:
    per_vertex: np.ndarray
    global_error: float
    rms: float
    raw_sum: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            n=int(self.per_vertex.shape[0]),
            global_error=self.global_error,
            rms=self.rms,
            raw_sum=self.raw_sum,
            max_vertex_error=float(self.per_vertex.max(initial=0.0)),
        )


def inverse_edge_lengths(mesh: HscMesh, graph: HscAdjacencyGraph) -> np.ndarray:
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    lengths = np.linalg.norm(mesh.vertices[i] - mesh.vertices[j], axis=1)
    if np.any(lengths == 0.0):
        edge = int(np.argmax(lengths == 0.0))
        raise HscNumericalError(
            f"zero-length edge ({int(i[edge])}, {int(j[edge])}); GL is undefined"
        )
    return 1.0 / lengths


def geometric_laplacian(
    mesh: HscMesh, graph: HscAdjacencyGraph | None = None
) -> np.ndarray:
    """GL of every vertex as an n x 3 array; isolated vertices get 0."""
    graph = build_adjacency(mesh) if graph is None else graph
    n = mesh.n_vertices
    weights = inverse_edge_lengths(mesh, graph)
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    rows, cols = np.concatenate([i, j]), np.concatenate([j, i])
    matrix = sp.csr_matrix(
        (np.concatenate([weights, weights]), (rows, cols)), shape=(n, n)
    )
    total = np.asarray(matrix.sum(axis=1)).ravel()
    weighted = matrix @ mesh.vertices
    gl = np.zeros_like(mesh.vertices)
    connected = total > 0.0
    gl[connected] = (
        mesh.vertices[connected] - weighted[connected] / total[connected, None]
    )
    return gl


def gl_term(mesh: HscMesh, vertex_index: int) -> np.ndarray:
    """GL of a single vertex."""
    if vertex_index not in range(mesh.n_vertices):
        raise HscUsageError(
            f"vertex {vertex_index} out of range [0, {mesh.n_vertices})"
        )
    graph = build_adjacency(mesh)
    neighbors = graph.neighbors(vertex_index)
    point = mesh.vertices[vertex_index]
    if neighbors.size == 0:
        return np.zeros(3)
    lengths = np.linalg.norm(mesh.vertices[neighbors] - point, axis=1)
    if np.any(lengths == 0.0):
        raise HscNumericalError(
            f"zero-length edge at vertex {vertex_index}; GL is undefined"
        )
    weights = 1.0 / lengths
    return point - weights @ mesh.vertices[neighbors] / weights.sum()


def visual_error(original: HscMesh, reconstructed: HscMesh) -> HscErrorReport:
    if not original.same_connectivity(reconstructed):
        raise HscConnectivityError(
            "meshes differ in connectivity "
            f"({original.n_vertices} vs {reconstructed.n_vertices} vertices, "
            f"{original.n_faces} vs {reconstructed.n_faces} faces)"
        )
    n = original.n_vertices
    if n == 0:
        raise HscUsageError("visual error of an empty mesh is undefined")
    area = surface_area(original)
    if area == 0.0:
        raise HscNumericalError("original mesh has zero surface area")
    graph = build_adjacency(original)
    displacement = np.linalg.norm(
        original.vertices - reconstructed.vertices, axis=1
    )
    smoothness = np.linalg.norm(
        geometric_laplacian(original, graph)
        - geometric_laplacian(reconstructed, graph),
        axis=1,
    )
    per_vertex = (displacement + smoothness) / (2.0 * n)
    per_vertex.setflags(write=False)
    raw_sum = float(per_vertex.sum())
    report = HscErrorReport(
        per_vertex=per_vertex,
        global_error=raw_sum / area,
        rms=float(np.sqrt(np.sum(displacement**2) / n)),
        raw_sum=raw_sum,
    )
    logger.debug("visual error: %s", report.to_dict())
    return report
