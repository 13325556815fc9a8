"""
# Spectral truncation

Keep the first n_d (lowest-frequency) coefficients of an orthobasis
expansion. With the Laplacian basis this is the classic MHB codec; the
Hamiltonian variant swaps in the eigenbasis of L + mu V with V the linear
potential laid over the vertices in order of their truncation error.

Both orientations of that order are searched. Reversing the order turns V
into c - V, whose Hamiltonian L - mu V + mu c has the eigenvectors of
L - mu V, so the pair covers every grid mu with either sign. The block's
permutation record tells the decoder which orientation won. mu = 0 is always
a candidate; at mu = 0 the basis is the Laplacian basis, so the Hamiltonian
variant never loses to plain truncation at equal n_d.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from hsc.codec.hsc_block import (
    HscBlockOperator,
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
from hsc.codec.hsc_container import HscCompressedMesh, block_partition
from hsc.codec.hsc_rate import solve_sparsity
from hsc.error import HscUsageError
from hsc.meshio.hsc_mesh import HscMesh
from hsc.sparse.hsc_somp import HscSparseCode
from hsc.spectral.hsc_spectral import HscPotential, HscSpectralBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HscTruncationChoice:
    """Outcome of the Hamiltonian truncation search. `mu` is 0.0 when the
    Laplacian basis won, in which case `basis` is that basis."""

    mu: float
    basis: HscSpectralBasis
    code: HscSparseCode
    permutation: Optional[np.ndarray]


def truncation_code(
    u_block: np.ndarray, basis: HscSpectralBasis, n_d: int
) -> HscSparseCode:
    """Support = eigen indices 0..n_d-1, coefficients <u, phi_i> per
    channel."""
    u_block = np.asarray(u_block, dtype=np.float64)
    if u_block.ndim == 1:
        u_block = u_block[:, None]
    if n_d < 0 or n_d > basis.n:
        raise HscUsageError(f"n_d={n_d} must be in [0, {basis.n}]")
    head = basis.vectors[:, :n_d]
    coefficients = head.T @ u_block
    residual = u_block - head @ coefficients
    return HscSparseCode(
        np.arange(n_d, dtype=np.int64),
        coefficients,
        (float(np.linalg.norm(u_block)), float(np.linalg.norm(residual))),
    )


def truncation_error_permutation(
    u_block: np.ndarray, basis: HscSpectralBasis, n_d: int
) -> np.ndarray:
    """Vertices by descending truncation error (ties: ascending index)."""
    code = truncation_code(u_block, basis, n_d)
    reconstruction = basis.vectors[:, :n_d] @ code.coefficients
    errors = vertex_errors(u_block, reconstruction)
    return np.argsort(-errors, kind="stable")


def best_truncation(
    u_block: np.ndarray,
    laplacian: sp.spmatrix,
    basis: HscSpectralBasis,
    n_d: int,
    mu_grid: Sequence[float],
    potential: HscPotential,
    permutation: Optional[np.ndarray],
) -> HscTruncationChoice:
    best = HscTruncationChoice(
        0.0, basis, truncation_code(u_block, basis, n_d), permutation
    )
    for mu in mu_grid:
        if mu <= 0.0:
            continue
        candidate = hamiltonian_basis(laplacian, potential, mu)
        code = truncation_code(u_block, candidate, n_d)
        # Strict improvement only, so ties keep the smaller mu.
        if code.residual < best.code.residual:
            best = HscTruncationChoice(mu, candidate, code, permutation)
    logger.debug(
        "truncation at n_d=%d: mu=%g, residual %.6g",
        n_d,
        best.mu,
        best.code.residual,
    )
    return best


def hamiltonian_truncation(
    u_block: np.ndarray,
    laplacian: sp.spmatrix,
    basis: HscSpectralBasis,
    n_d: int,
    mu_grid: Sequence[float],
) -> HscTruncationChoice:
    """Truncate u_block on the best of the Laplacian basis and the
    Hamiltonian bases for every mu in `mu_grid` and both orientations of the
    truncation error order. Ties keep the descending orientation."""
    descending = truncation_error_permutation(u_block, basis, n_d)
    best: Optional[HscTruncationChoice] = None
    for permutation in (descending, descending[::-1].copy()):
        choice = best_truncation(
            u_block,
            laplacian,
            basis,
            n_d,
            mu_grid,
            block_potential(basis.n, permutation),
            permutation,
        )
        if best is None or choice.code.residual < best.code.residual:
            best = choice
    assert best is not None
    return best


################################################################################
### CODEC
################################################################################


def truncation_sparsity(n: int, config: HscEncoderConfig, n_mu: int) -> int:
    n_d = solve_sparsity(
        n,
        config.target_ratio,
        k=config.coordinate_bits,
        k_d=config.coefficient_bits,
        m=None,
        n_mu=n_mu,
        k_mu=config.mu_bits,
    )
    if n_d == 0:
        raise HscUsageError(
            f"target ratio {config.target_ratio} leaves no coefficient for a "
            f"block of {n} vertices; use a larger ratio or block size"
        )
    return n_d


def encode_truncation(
    mesh: HscMesh,
    config: HscEncoderConfig,
    use_hamiltonian: bool,
    complete: bool = False,
) -> HscCompressedMesh:
    """mhb-trunc (`use_hamiltonian=False`) or ham-trunc. `complete` keeps
    every coefficient (n_d = block size); the full-rate sparse codec is
    complete mhb-trunc."""
    if mesh.n_vertices == 0:
        raise HscUsageError("cannot encode an empty mesh")
    in_place = config.potential_placement == HscPotentialPlacement.IN_PLACE
    n_mu = 1 if use_hamiltonian else 0
    orders = block_partition(mesh.n_vertices, mesh.faces, config.block_size)

    operators = map_blocks(
        lambda order: prepare_block(mesh, order), orders, config.workers
    )
    sparsities = [
        op.n if complete else truncation_sparsity(op.n, config, n_mu)
        for op in operators
    ]

    def search_block(block_id: int) -> HscTruncationChoice:
        op: HscBlockOperator = operators[block_id]
        return hamiltonian_truncation(
            op.signals,
            op.laplacian,
            op.basis,
            sparsities[block_id],
            block_mu_grid(config, op.basis.mean_eigenvalue(), truncation=True),
        )

    choices: List[Optional[HscTruncationChoice]] = [None] * len(operators)
    if use_hamiltonian:
        choices = map_blocks(
            search_block, range(len(operators)), config.workers
        )

    faces, vertex_order = mesh.faces, None
    if in_place:
        permutations = [
            choice.permutation if choice is not None and choice.mu else None
            for choice in choices
        ]
        vertex_order, faces, ranges = relabel_in_place(
            mesh.faces, orders, permutations
        )
        transmitted = HscMesh(mesh.vertices[vertex_order], faces)
        operators = map_blocks(
            lambda order: prepare_block(transmitted, order),
            ranges,
            config.workers,
        )

    def encode_block(block_id: int):
        op: HscBlockOperator = operators[block_id]
        n_d = sparsities[block_id]
        if not use_hamiltonian:
            code = truncation_code(op.signals, op.basis, n_d)
            return pack_block(
                block_id,
                op.n,
                (),
                code,
                config.coefficient_bits,
                truncated=True,
            )
        choice = choices[block_id]
        if in_place:
            # The transmitted order already is the potential order.
            choice = best_truncation(
                op.signals,
                op.laplacian,
                op.basis,
                n_d,
                block_mu_grid(
                    config, op.basis.mean_eigenvalue(), truncation=True
                ),
                block_potential(op.n, None),
                None,
            )
        assert choice is not None
        mus = (choice.mu,) if choice.mu > 0.0 else ()
        return pack_block(
            block_id,
            op.n,
            mus,
            choice.code,
            config.coefficient_bits,
            permutation=choice.permutation if mus else None,
            truncated=True,
        )

    blocks = map_blocks(encode_block, range(len(operators)), config.workers)
    compressed = HscCompressedMesh(
        n_vertices=mesh.n_vertices,
        faces=np.asarray(faces),
        block_size=config.block_size,
        coefficient_bits=config.coefficient_bits,
        placement=config.potential_placement,
        truncated=True,
        blocks=tuple(blocks),
        coordinate_bits=config.coordinate_bits,
        vertex_order=vertex_order,
    )
    logger.info(
        "%s: %d blocks, ratio %.6f",
        "ham-trunc" if use_hamiltonian else "mhb-trunc",
        len(blocks),
        compressed.compression_ratio(),
    )
    return compressed
