"""
# Sparse Hamiltonian codec

Per block:

1. Laplacian basis Phi of the block.
2. S-OMP on [Phi] at the sparsity k that meets the target ratio when all
   `max_subdicts` Hamiltonian sub-dictionaries are used.
3. Sort the vertices by ascending S-OMP error (stable).
4. Lay the linear potential over that order: the worst-reproduced vertex
   gets the highest potential.
5. Append Psi_mu (best mu of the grid, see `search_mu`) while the relative
   residual improvement exceeds `improvement_tolerance` and fewer than
   `max_subdicts` sub-dictionaries were appended.
6. For every prefix D_S = [Phi, Psi_mu1, ...] of the appended
   sub-dictionaries (the empty one included), re-solve k for that prefix
   and run S-OMP on it; keep the prefix with the smallest residual. A block
   whose Hamiltonians do not pay for their bits is plain MHB-SOMP.
7. Quantize the coefficients to k_d bits.

The decoder rebuilds the partition and every operator from connectivity, the
stored mu values and the stored permutation, so it needs no geometry.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from hsc.codec.hsc_block import (
    HscBlockOperator,
    block_dictionary,
    block_laplacian,
    block_potential,
    hamiltonian_basis,
    map_blocks,
    pack_block,
    prepare_block,
    relabel_in_place,
    vertex_errors,
)
from hsc.codec.hsc_config import (
    HscEncoderConfig,
    HscPotentialPlacement,
    block_mu_grid,
)
from hsc.codec.hsc_container import (
    HscCompressedBlock,
    HscCompressedMesh,
    block_partition,
)
from hsc.codec.hsc_quantize import dequantize
from hsc.codec.hsc_rate import solve_sparsity, use_bit_vector
from hsc.codec.hsc_truncation import encode_truncation
from hsc.error import HscFormatError, HscUsageError
from hsc.meshio.hsc_mesh import HscMesh
from hsc.sparse.hsc_dictionary import build_dictionary
from hsc.sparse.hsc_somp import HscSparseCode, reconstruct, somp
from hsc.spectral.hsc_spectral import HscPotential, HscSpectralBasis

logger = logging.getLogger(__name__)

# Below this fraction of ||U||_F the block is already exact; skip the search.
RESIDUAL_FLOOR = 1e-12


@dataclass(frozen=True)
class HscMuSearchResult:
    mu: float
    residual: float
    basis: HscSpectralBasis
    code: HscSparseCode


@dataclass(frozen=True)
class HscBlockAnalysis:
    operator: HscBlockOperator
    k: int
    code: HscSparseCode
    permutation: Optional[np.ndarray]


def vertex_error_permutation(
    mesh_block: HscMesh | np.ndarray,
    basis: HscSpectralBasis,
    k: int,
    code: Optional[HscSparseCode] = None,
) -> np.ndarray:
    """Block vertices by ascending error of the k-sparse S-OMP code on the
    basis alone; ties keep ascending index. `code` skips the S-OMP when the
    caller already has it."""
    if isinstance(mesh_block, HscMesh):
        signals = mesh_block.vertices
    else:
        signals = np.asarray(mesh_block, dtype=np.float64)
    dictionary = build_dictionary([basis])
    if code is None:
        code = somp(signals, dictionary, k)
    errors = vertex_errors(signals, reconstruct(dictionary, code))
    return np.argsort(errors, kind="stable")


def search_mu(
    u_block: np.ndarray,
    laplacian: sp.spmatrix,
    potential: HscPotential,
    existing_bases: Sequence[HscSpectralBasis],
    k: int,
    mu_grid: Sequence[float],
) -> HscMuSearchResult:
    """Try [existing bases, Psi_mu] for every mu of the grid; the smallest
    S-OMP residual wins, ties going to the smaller mu."""
    if len(mu_grid) == 0:
        raise HscUsageError("mu grid must not be empty")
    best: Optional[HscMuSearchResult] = None
    for mu in sorted(mu_grid):
        candidate = hamiltonian_basis(laplacian, potential, mu)
        dictionary = build_dictionary([*existing_bases, candidate])
        code = somp(u_block, dictionary, k)
        if best is None or code.residual < best.residual:
            best = HscMuSearchResult(float(mu), code.residual, candidate, code)
    assert best is not None
    return best


################################################################################
### ENCODER
################################################################################


def sparse_sparsity(n: int, config: HscEncoderConfig, n_mu: int) -> int:
    return solve_sparsity(
        n,
        config.target_ratio,
        k=config.coordinate_bits,
        k_d=config.coefficient_bits,
        m=(1 + n_mu) * n,
        n_mu=n_mu,
        k_mu=config.mu_bits,
    )


def analyse_block(
    mesh: HscMesh,
    order: np.ndarray,
    config: HscEncoderConfig,
    rank_vertices: bool = True,
) -> HscBlockAnalysis:
    """Steps 1-3. The permutation is only computed when asked for and a
    Hamiltonian can be appended."""
    operator = prepare_block(mesh, order)
    k = sparse_sparsity(operator.n, config, config.max_subdicts)
    if k == 0:
        raise HscUsageError(
            f"target ratio {config.target_ratio} leaves no atom for a block of "
            f"{operator.n} vertices; use a larger ratio or block size"
        )
    code = somp(operator.signals, build_dictionary([operator.basis]), k)
    permutation = None
    if rank_vertices and config.max_subdicts > 0:
        permutation = vertex_error_permutation(
            operator.signals, operator.basis, k, code=code
        )
    return HscBlockAnalysis(operator, k, code, permutation)


def encode_block(
    block_id: int,
    analysis: HscBlockAnalysis,
    permutation: Optional[np.ndarray],
    config: HscEncoderConfig,
) -> HscCompressedBlock:
    """Steps 4-7. `permutation` places the potential (None: identity)."""
    op = analysis.operator
    bases: List[HscSpectralBasis] = [op.basis]
    mus: List[float] = []
    residual = analysis.code.residual
    scale = float(np.linalg.norm(op.signals))
    if config.max_subdicts > 0 and residual > RESIDUAL_FLOOR * scale:
        potential = block_potential(op.n, permutation)
        grid = block_mu_grid(config, op.basis.mean_eigenvalue())
        while len(mus) < config.max_subdicts:
            result = search_mu(
                op.signals, op.laplacian, potential, bases, analysis.k, grid
            )
            gain = residual - result.residual
            if gain <= config.improvement_tolerance * residual:
                break
            logger.debug(
                "block %d: mu=%g lowers the residual %.6g -> %.6g",
                block_id,
                result.mu,
                residual,
                result.residual,
            )
            bases.append(result.basis)
            mus.append(result.mu)
            residual = result.residual

    # Each prefix of the kept sub-dictionaries at its own k; the empty prefix
    # is the plain MHB code. Ties keep the shorter prefix.
    kept = 0
    best_code: Optional[HscSparseCode] = None
    for n_mu in range(len(mus) + 1):
        k = sparse_sparsity(op.n, config, n_mu)
        # Fewer sub-dictionaries only ever cost fewer bits.
        assert k >= analysis.k
        if n_mu == 0 and k == analysis.k:
            code = analysis.code
        else:
            code = somp(op.signals, build_dictionary(bases[: 1 + n_mu]), k)
        if best_code is None or code.residual < best_code.residual:
            best_code, kept = code, n_mu
    assert best_code is not None
    if kept < len(mus):
        logger.debug(
            "block %d: %d of %d mu values pay for their bits",
            block_id,
            kept,
            len(mus),
        )
    mus = mus[:kept]
    code = best_code
    if use_bit_vector((1 + kept) * op.n, code.k):
        code = code.sorted_by_atom()
    logger.debug(
        "block %d: n=%d k=%d n_mu=%d residual %.6g",
        block_id,
        op.n,
        code.k,
        kept,
        code.residual,
    )
    return pack_block(
        block_id,
        op.n,
        mus,
        code,
        config.coefficient_bits,
        permutation=permutation if mus else None,
    )


def encode(mesh: HscMesh, config: HscEncoderConfig) -> HscCompressedMesh:
    if mesh.n_vertices == 0:
        raise HscUsageError("cannot encode an empty mesh")
    if config.full_rate:
        logger.info("full rate: complete Laplacian expansion per block")
        return encode_truncation(
            mesh, config, use_hamiltonian=False, complete=True
        )
    in_place = config.potential_placement == HscPotentialPlacement.IN_PLACE
    orders = block_partition(mesh.n_vertices, mesh.faces, config.block_size)
    analyses = map_blocks(
        lambda order: analyse_block(mesh, order, config), orders, config.workers
    )

    faces, vertex_order = mesh.faces, None
    permutations = [analysis.permutation for analysis in analyses]
    if in_place:
        vertex_order, faces, ranges = relabel_in_place(
            mesh.faces, orders, permutations
        )
        transmitted = HscMesh(mesh.vertices[vertex_order], faces)
        analyses = map_blocks(
            lambda order: analyse_block(
                transmitted, order, config, rank_vertices=False
            ),
            ranges,
            config.workers,
        )
        # The transmitted order already is the potential order.
        permutations = [None] * len(analyses)

    blocks = map_blocks(
        lambda b: encode_block(b, analyses[b], permutations[b], config),
        range(len(analyses)),
        config.workers,
    )
    compressed = HscCompressedMesh(
        n_vertices=mesh.n_vertices,
        faces=np.asarray(faces),
        block_size=config.block_size,
        coefficient_bits=config.coefficient_bits,
        placement=config.potential_placement,
        truncated=False,
        blocks=tuple(blocks),
        coordinate_bits=config.coordinate_bits,
        vertex_order=vertex_order,
    )
    logger.info(
        "encoded %d vertices in %d blocks: ratio %.6f, %d mu values",
        mesh.n_vertices,
        len(blocks),
        compressed.compression_ratio(),
        sum(block.n_mu for block in blocks),
    )
    return compressed


################################################################################
### DECODER
################################################################################


def decode_block(
    block: HscCompressedBlock, order: np.ndarray, compressed: HscCompressedMesh
) -> np.ndarray:
    if block.n != order.shape[0]:
        raise HscFormatError(
            f"block {block.block_id} holds {block.n} vertices, partition gives "
            f"{order.shape[0]}"
        )
    laplacian = block_laplacian(compressed.faces, order, compressed.n_vertices)
    dictionary = block_dictionary(block, laplacian)
    if block.k and int(block.support.max()) >= dictionary.m:
        raise HscFormatError(
            f"block {block.block_id}: support index {int(block.support.max())} "
            f"out of range [0, {dictionary.m})"
        )
    coefficients = dequantize(block.quantized)
    return reconstruct(dictionary, HscSparseCode(block.support, coefficients))


def decode(compressed: HscCompressedMesh, workers: int = 1) -> HscMesh:
    """Vertices come back in transmitted order (the original order unless the
    stream was written in place)."""
    orders = compressed.block_orders()
    if len(orders) != len(compressed.blocks):
        raise HscFormatError(
            f"container holds {len(compressed.blocks)} blocks, partition gives "
            f"{len(orders)}"
        )
    pieces = map_blocks(
        lambda b: decode_block(compressed.blocks[b], orders[b], compressed),
        range(len(orders)),
        workers,
    )
    vertices = np.zeros((compressed.n_vertices, 3))
    for order, piece in zip(orders, pieces):
        vertices[order] = piece
    logger.debug("decoded %d blocks", len(pieces))
    return HscMesh(vertices, compressed.faces)


def restore_original_order(
    decoded: HscMesh, vertex_order: Optional[np.ndarray]
) -> HscMesh:
    """Undo in-place relabelling with the encoder-side `vertex_order`."""
    if vertex_order is None:
        return decoded
    vertices = np.empty_like(decoded.vertices)
    vertices[vertex_order] = decoded.vertices
    return HscMesh(vertices, vertex_order[decoded.faces])
