"""
# Partitioner

Greedy BFS region growing, so that encoder and decoder derive the identical
blocks from connectivity alone:

1. Seed a block at the lowest-index unassigned vertex.
2. Grow it breadth-first over unassigned vertices, visiting neighbours in
   ascending index order, until it holds `target_size` vertices or its
   component is exhausted.
3. Repeat until every vertex is assigned.
4. Merge every block smaller than ceil(target_size / 2) into the adjacent
   block it shares the most edges with (ties go to the lower block id),
   unless that would push the receiving block past 2 * target_size.
   Blocks with no usable neighbour are kept as they are.

Within a block, vertices are listed in ascending global index order.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from hsc.error import HscUsageError
from hsc.graph.hsc_graph import HscAdjacencyGraph
from hsc.meshio.hsc_mesh import HscMesh

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 300


@dataclass(frozen=True)
class HscPartitionSet:
    assignment: np.ndarray
    blocks: Tuple[np.ndarray, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> List[int]:
        return [len(block) for block in self.blocks]

    def block_faces(self, faces: np.ndarray, block_id: int) -> np.ndarray:
        """Faces whose three vertices all lie in the block (global indices)."""
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        inside = np.all(self.assignment[faces] == block_id, axis=1)
        return faces[inside]

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            n_blocks=self.n_blocks,
            block_sizes=self.block_sizes(),
        )


def grow_blocks(graph: HscAdjacencyGraph, target_size: int) -> np.ndarray:
    assignment = np.full(graph.n, -1, dtype=np.int64)
    block_id = 0
    for seed in range(graph.n):
        if assignment[seed] != -1:
            continue
        assignment[seed] = block_id
        size = 1
        queue = deque([seed])
        while queue and size < target_size:
            vertex = queue.popleft()
            for neighbor in graph.neighbors(vertex):
                if assignment[neighbor] != -1:
                    continue
                assignment[neighbor] = block_id
                size += 1
                queue.append(neighbor)
                if size == target_size:
                    break
        block_id += 1
    return assignment


def shared_edge_counts(
    graph: HscAdjacencyGraph, assignment: np.ndarray, block_id: int
) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    a = assignment[graph.edges[:, 0]]
    b = assignment[graph.edges[:, 1]]
    for mine, theirs in ((a, b), (b, a)):
        crossing = (mine == block_id) & (theirs != block_id)
        for other in theirs[crossing].tolist():
            counts[other] = counts.get(other, 0) + 1
    return counts


def merge_small_blocks(
    graph: HscAdjacencyGraph, assignment: np.ndarray, target_size: int
) -> np.ndarray:
    assignment = assignment.copy()
    min_size = -(-target_size // 2)
    n_blocks = int(assignment.max()) + 1 if graph.n else 0
    sizes = np.bincount(assignment, minlength=n_blocks)
    for block_id in range(n_blocks):
        if sizes[block_id] == 0 or sizes[block_id] >= min_size:
            continue
        counts = shared_edge_counts(graph, assignment, block_id)
        candidates = [
            (-shared, other)
            for other, shared in counts.items()
            if sizes[other] + sizes[block_id] <= 2 * target_size
        ]
        if not candidates:
            logger.warning(
                "block %d keeps %d vertices (no neighbour can absorb it)",
                block_id,
                sizes[block_id],
            )
            continue
        _, into = min(candidates)
        assignment[assignment == block_id] = into
        sizes[into] += sizes[block_id]
        sizes[block_id] = 0
    # Relabel surviving blocks consecutively, keeping their order.
    _, relabeled = np.unique(assignment, return_inverse=True)
    return relabeled.astype(np.int64)


def partition(graph: HscAdjacencyGraph, target_size: int) -> HscPartitionSet:
    if target_size < 1:
        raise HscUsageError(f"target_size must be >= 1, got {target_size}")
    assignment = grow_blocks(graph, target_size)
    if graph.n:
        assignment = merge_small_blocks(graph, assignment, target_size)
    n_blocks = int(assignment.max()) + 1 if graph.n else 0
    order = np.argsort(assignment, kind="stable")
    bounds = np.searchsorted(assignment[order], np.arange(n_blocks + 1))
    blocks = tuple(
        order[bounds[b] : bounds[b + 1]].copy() for b in range(n_blocks)
    )
    for block in blocks:
        block.setflags(write=False)
    assignment.setflags(write=False)
    logger.debug(
        "partitioned %d vertices into %d blocks (target %d)",
        graph.n,
        n_blocks,
        target_size,
    )
    return HscPartitionSet(assignment, blocks)


def extract_submesh(
    mesh: HscMesh, partition_set: HscPartitionSet, block_id: int
) -> Tuple[HscMesh, np.ndarray]:
    """Block vertices plus the faces lying entirely inside the block, with
    local indices. The returned map sends local index -> global index."""
    if block_id not in range(partition_set.n_blocks):
        raise HscUsageError(
            f"block id {block_id} out of range [0, {partition_set.n_blocks})"
        )
    local_to_global = partition_set.blocks[block_id]
    global_to_local = np.full(mesh.n_vertices, -1, dtype=np.int64)
    global_to_local[local_to_global] = np.arange(len(local_to_global))
    faces = partition_set.block_faces(mesh.faces, block_id)
    submesh = HscMesh(mesh.vertices[local_to_global], global_to_local[faces])
    return submesh, local_to_global
