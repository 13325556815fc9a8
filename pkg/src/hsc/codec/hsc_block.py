"""
# Per-block plumbing shared by the encoders and the decoder

A block is a list of global vertex indices (`order`); local vertex i is
global vertex order[i]. Its operator is the Laplacian of the faces lying
entirely inside the block, built in local order. The encoder and the decoder
go through these same functions, so both sides build bit-identical operators
from identical inputs.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import scipy.sparse as sp

from hsc.codec.hsc_container import HscCompressedBlock
from hsc.codec.hsc_quantize import quantize
from hsc.error import HscUsageError
from hsc.graph.hsc_graph import (
    build_adjacency_from_faces,
    combinatorial_laplacian,
)
from hsc.meshio.hsc_mesh import HscMesh
from hsc.sparse.hsc_dictionary import HscDictionary, build_dictionary
from hsc.sparse.hsc_somp import HscSparseCode
from hsc.spectral.hsc_spectral import (
    HscPotential,
    HscSpectralBasis,
    eigendecompose_symmetric,
    hamiltonian,
    linear_potential,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def local_faces(
    faces: np.ndarray, order: np.ndarray, n_vertices: int
) -> np.ndarray:
    """Faces with all three corners in the block, in local indices."""
    local = np.full(n_vertices, -1, dtype=np.int64)
    local[order] = np.arange(order.shape[0])
    mapped = local[np.asarray(faces, dtype=np.int64).reshape(-1, 3)]
    return mapped[np.all(mapped >= 0, axis=1)]


def block_laplacian(
    faces: np.ndarray, order: np.ndarray, n_vertices: int
) -> sp.csr_matrix:
    graph = build_adjacency_from_faces(
        order.shape[0], local_faces(faces, order, n_vertices)
    )
    return combinatorial_laplacian(graph)


@dataclass(frozen=True)
class HscBlockOperator:
    """A block's coordinates in local order with its Laplacian and MHB."""

    order: np.ndarray
    signals: np.ndarray
    laplacian: sp.csr_matrix
    basis: HscSpectralBasis

    @property
    def n(self) -> int:
        return int(self.order.shape[0])


def prepare_block(mesh: HscMesh, order: np.ndarray) -> HscBlockOperator:
    laplacian = block_laplacian(mesh.faces, order, mesh.n_vertices)
    return HscBlockOperator(
        order=order,
        signals=mesh.vertices[order],
        laplacian=laplacian,
        basis=eigendecompose_symmetric(laplacian),
    )


def block_potential(n: int, permutation: Optional[np.ndarray]) -> HscPotential:
    """Linear potential whose i-th smallest value sits on vertex
    permutation[i]; the identity placement when `permutation` is None."""
    potential = linear_potential(n)
    if permutation is None:
        return potential
    return potential.placed(permutation)


def hamiltonian_basis(
    laplacian: sp.csr_matrix, potential: HscPotential, mu: float
) -> HscSpectralBasis:
    return eigendecompose_symmetric(
        hamiltonian(laplacian, potential.with_mu(mu))
    )


def vertex_errors(
    signals: np.ndarray, reconstruction: np.ndarray
) -> np.ndarray:
    """Per-vertex l2 distance between two n x 3 coordinate tables."""
    return np.linalg.norm(signals - reconstruction, axis=1)


def block_dictionary(
    block: HscCompressedBlock,
    laplacian: sp.csr_matrix,
    laplacian_basis: Optional[HscSpectralBasis] = None,
) -> HscDictionary:
    """The dictionary the block's support indexes into: [Phi, Psi_mu1, ...]
    for sparse blocks, the single basis (Phi or Psi_mu) for truncation
    blocks. Hamiltonians are only built when the block stores a mu."""
    bases: List[HscSpectralBasis] = []
    if not (block.truncated and block.n_mu):
        bases.append(
            laplacian_basis
            if laplacian_basis is not None
            else eigendecompose_symmetric(laplacian)
        )
    if block.n_mu:
        potential = block_potential(block.n, block.permutation)
        bases.extend(
            hamiltonian_basis(laplacian, potential, mu) for mu in block.mus
        )
    return build_dictionary(bases)


def pack_block(
    block_id: int,
    n: int,
    mus: Sequence[float],
    code: HscSparseCode,
    bits: int,
    permutation: Optional[np.ndarray] = None,
    truncated: bool = False,
) -> HscCompressedBlock:
    return HscCompressedBlock(
        block_id=block_id,
        n=n,
        mus=tuple(float(mu) for mu in mus),
        support=np.asarray(code.support, dtype=np.int64),
        quantized=quantize(code.coefficients, bits),
        permutation=permutation,
        truncated=truncated,
    )


def relabel_in_place(
    faces: np.ndarray,
    orders: Sequence[np.ndarray],
    permutations: Sequence[Optional[np.ndarray]],
) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """Transmit every block in its permuted order. Returns (vertex_order,
    relabelled faces, contiguous block ranges); vertex_order[t] is the
    original index of transmitted vertex t."""
    pieces = [
        order if permutation is None else order[permutation]
        for order, permutation in zip(orders, permutations)
    ]
    vertex_order = (
        np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    )
    transmitted = np.empty_like(vertex_order)
    transmitted[vertex_order] = np.arange(vertex_order.shape[0])
    relabelled = transmitted[np.asarray(faces, dtype=np.int64).reshape(-1, 3)]
    bounds = np.cumsum([0] + [piece.shape[0] for piece in pieces])
    ranges = [np.arange(bounds[b], bounds[b + 1]) for b in range(len(pieces))]
    return vertex_order, relabelled, ranges


def map_blocks(
    function: Callable[[T], R], items: Iterable[T], workers: int
) -> List[R]:
    """Apply `function` per block; results come back in input order."""
    items = list(items)
    if workers < 1:
        raise HscUsageError(f"workers must be positive, got {workers}")
    if workers == 1 or len(items) < 2:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))
