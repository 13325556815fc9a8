"""
# Weighted-gradient bound on a 1D chain

With a square forward-difference factor D (L = D^T D) and a potential V,

    W = (I + D^-T (mu V) D^-1)^(1/2),    (W D)^T (W D) = L + mu V = H,

and truncating f to its first k Hamiltonian eigenvectors leaves

    ||f - sum_{i<=k} <f, psi_i> psi_i||^2  <=  ||W D f||^2 / E_{k+1}.

D is the Dirichlet bidiagonal (1 on the diagonal, -1 below it), which is
invertible; the periodic and free-end difference operators are singular.
"""

from typing import Optional, Tuple

import numpy as np

from hsc.error import HscNumericalError, HscUsageError
from hsc.spectral.hsc_spectral import (
    HscPotential,
    eigendecompose_symmetric,
    hamiltonian,
)

SINGULARITY_TOLERANCE = 1e-12


def chain_difference_operator(n: int) -> np.ndarray:
    if n < 1:
        raise HscUsageError(f"chain length must be >= 1, got {n}")
    return np.eye(n) - np.eye(n, k=-1)


def weighted_gradient_operator(
    potential: HscPotential, difference: Optional[np.ndarray] = None
) -> np.ndarray:
    """Return W D for the chain of len(potential.diagonal) vertices."""
    n = potential.diagonal.shape[0]
    d = chain_difference_operator(n) if difference is None else difference
    if d.shape != (n, n):
        raise HscUsageError(
            f"difference operator must be {n}x{n}, got {d.shape}"
        )
    singular_values = np.linalg.svd(d, compute_uv=False)
    if singular_values.min() <= SINGULARITY_TOLERANCE * singular_values.max():
        raise HscNumericalError("difference operator is singular")
    mu = 0.0 if potential.mu is None else potential.mu
    d_inv = np.linalg.inv(d)
    inner = np.eye(n) + d_inv.T @ np.diag(mu * potential.diagonal) @ d_inv
    inner = (inner + inner.T) / 2.0
    basis = eigendecompose_symmetric(inner)
    # inner is I plus a PSD matrix, so every eigenvalue is >= 1.
    root = basis.vectors @ np.diag(np.sqrt(basis.values)) @ basis.vectors.T
    return root @ d


def verify_weighted_gradient_bound(
    n: int,
    potential: HscPotential,
    f: np.ndarray,
    k: int,
    difference: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """Return (||r_k||^2, ||W D f||^2 / E_{k+1}); the caller asserts
    residual <= bound."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (n,) or potential.diagonal.shape != (n,):
        raise HscUsageError(f"expected vectors of length {n}")
    if k not in range(n):
        raise HscUsageError(f"truncation order must be in [0, {n}), got {k}")
    d = chain_difference_operator(n) if difference is None else difference
    weighted = weighted_gradient_operator(potential, d)
    mu = 0.0 if potential.mu is None else potential.mu
    operator = hamiltonian(d.T @ d, potential.with_mu(mu))
    basis = eigendecompose_symmetric((operator + operator.T) / 2.0)
    head = basis.vectors[:, :k]
    residual = f - head @ (head.T @ f)
    bound = float(np.sum((weighted @ f) ** 2) / basis.values[k])
    return float(residual @ residual), bound
