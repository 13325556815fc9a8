"""
# Spectral bases

Dense eigendecomposition of the (small, per-block) Laplacian and Hamiltonian
operators. Blocks are a few hundred vertices and the dictionaries need the
full spectrum, so we call LAPACK's symmetric solver through
`scipy.linalg.eigh` rather than an iterative partial solver, and make its
output canonical with a sign convention:

    each eigenvector's entry of largest magnitude is positive
    (lowest index among entries within 1e-12 of that magnitude).
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from hsc.error import HscNumericalError, HscUsageError

logger = logging.getLogger(__name__)

SIGN_TIE_TOLERANCE = 1e-12

SymmetricMatrix = sp.spmatrix | np.ndarray


@dataclass(frozen=True)
class HscSpectralBasis:
    """Orthonormal eigenvectors (columns of `vectors`) with ascending
    `values`."""

    vectors: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def mean_eigenvalue(self) -> float:
        return float(self.values.mean()) if self.n else 0.0


@dataclass(frozen=True)
class HscPotential:
    """Diagonal potential V (unit Frobenius norm) and its weight mu. `mu` is
    None until a value is chosen."""

    diagonal: np.ndarray
    mu: Optional[float] = None

    def with_mu(self, mu: float) -> "HscPotential":
        return replace(self, mu=float(mu))

    def placed(self, order: np.ndarray) -> "HscPotential":
        """Move the i-th potential value onto vertex `order[i]`."""
        diagonal = np.empty_like(self.diagonal)
        diagonal[np.asarray(order)] = self.diagonal
        return replace(self, diagonal=diagonal)


def as_dense(matrix: SymmetricMatrix) -> np.ndarray:
    if sp.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix, dtype=np.float64)


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    if vectors.size == 0:
        return vectors
    magnitude = np.abs(vectors)
    peak = magnitude.max(axis=0)
    # First row (per column) whose magnitude ties the peak.
    pivot = np.argmax(magnitude >= peak - SIGN_TIE_TOLERANCE, axis=0)
    signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose_symmetric(matrix: SymmetricMatrix) -> HscSpectralBasis:
    dense = as_dense(matrix)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise HscUsageError(f"expected a square matrix, got {dense.shape}")
    if not np.array_equal(dense, dense.T):
        raise HscUsageError("matrix is not exactly symmetric")
    n = dense.shape[0]
    if n == 0:
        return HscSpectralBasis(np.zeros((0, 0)), np.zeros(0))
    if not np.all(np.isfinite(dense)):
        raise HscNumericalError("matrix has non-finite entries")
    try:
        values, vectors = scipy.linalg.eigh(dense, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise HscNumericalError(
            f"symmetric eigensolver failed to converge on a {n}x{n} matrix: {e}"
        ) from e
    vectors = apply_sign_convention(vectors)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return HscSpectralBasis(vectors, values)


def hamiltonian(
    laplacian: SymmetricMatrix, potential: HscPotential
) -> SymmetricMatrix:
    """H = L + mu diag(V). The off-diagonal pattern of L is untouched."""
    n = laplacian.shape[0]
    if potential.diagonal.shape != (n,):
        raise HscUsageError(
            f"potential has {potential.diagonal.shape[0]} entries, operator is {n}x{n}"
        )
    if potential.mu is None:
        raise HscUsageError("potential weight mu is unset")
    if potential.mu == 0.0:
        return laplacian.copy()
    shift = potential.mu * potential.diagonal
    if sp.issparse(laplacian):
        return sp.csr_matrix(laplacian + sp.diags(shift, 0, shape=(n, n)))
    return np.asarray(laplacian, dtype=np.float64) + np.diag(shift)


def linear_potential(n: int) -> HscPotential:
    """V = diag(1, ..., n) / ||diag(1, ..., n)||_F."""
    if n < 1:
        raise HscUsageError(f"potential size must be >= 1, got {n}")
    ramp = np.arange(1, n + 1, dtype=np.float64)
    return HscPotential(ramp / np.sqrt(np.sum(ramp**2)))
