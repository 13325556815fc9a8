"""
# Simultaneous orthogonal matching pursuit

One support shared by the three coordinate channels. Each step selects the
unselected atom whose correlations with the residual have the largest l2
norm over channels (lowest atom index among scores within 1e-12), then
refits all coefficients by least squares on the support.

The refit keeps an orthonormal basis Q of the selected atoms (Gram-Schmidt
with one re-orthogonalization pass) and the triangular factor R with
D_S = Q R, so each step costs O(n k) and the residual is Y - Q Q^T Y.
An atom whose component orthogonal to the support has norm below 1e-10 is
skipped with a warning and the next best atom is taken instead.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.linalg

from hsc.error import HscUsageError
from hsc.sparse.hsc_dictionary import HscDictionary

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
COLLINEARITY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class HscSparseCode:
    """`support` in selection order and one coefficient row (X, Y, Z) per
    selected atom. `residual_history[i]` is the Frobenius residual after i
    selections (entry 0 is ||Y||_F)."""

    support: np.ndarray
    coefficients: np.ndarray
    residual_history: Tuple[float, ...] = ()
    skipped: Tuple[int, ...] = field(default=())

    @property
    def k(self) -> int:
        return int(self.support.shape[0])

    @property
    def residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else 0.0

    def sorted_by_atom(self) -> "HscSparseCode":
        """Same code with the support in ascending atom order."""
        order = np.argsort(self.support, kind="stable")
        return HscSparseCode(
            self.support[order],
            self.coefficients[order],
            self.residual_history,
            self.skipped,
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            support=self.support.tolist(),
            residual=self.residual,
            skipped=list(self.skipped),
        )


def select_atom(scores: np.ndarray, available: np.ndarray) -> int:
    """Lowest index among available atoms scoring within TIE_TOLERANCE of the
    best available score; -1 when nothing is available."""
    if not np.any(available):
        return -1
    masked = np.where(available, scores, -np.inf)
    best = masked.max()
    return int(np.argmax(masked >= best - TIE_TOLERANCE))


def orthogonal_component(
    q: np.ndarray, atom: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Component of `atom` orthogonal to the columns of q, and the projection
    coefficients onto them."""
    projection = q.T @ atom
    remainder = atom - q @ projection
    # Second pass recovers the orthogonality lost to cancellation.
    correction = q.T @ remainder
    remainder = remainder - q @ correction
    return remainder, projection + correction


def somp(
    signals: np.ndarray, dictionary: HscDictionary, k: int
) -> HscSparseCode:
    signals = np.asarray(signals, dtype=np.float64)
    if signals.ndim == 1:
        signals = signals[:, None]
    n, m = dictionary.n, dictionary.m
    if signals.shape[0] != n:
        raise HscUsageError(
            f"signals have {signals.shape[0]} rows, dictionary atoms have {n}"
        )
    if k < 0 or k > min(n, m):
        raise HscUsageError(f"sparsity k={k} must be in [0, {min(n, m)}]")
    atoms = dictionary.atoms
    channels = signals.shape[1]

    q = np.zeros((n, 0))
    r = np.zeros((0, 0))
    support: List[int] = []
    skipped: List[int] = []
    available = np.ones(m, dtype=bool)
    residual = signals.copy()
    history = [float(np.linalg.norm(residual))]

    while len(support) < k:
        scores = np.linalg.norm(atoms.T @ residual, axis=1)
        index = select_atom(scores, available)
        if index < 0:
            logger.warning(
                "S-OMP stopped at %d of %d atoms: no independent atom left",
                len(support),
                k,
            )
            break
        available[index] = False
        remainder, projection = orthogonal_component(q, atoms[:, index])
        norm = float(np.linalg.norm(remainder))
        if norm < COLLINEARITY_TOLERANCE:
            logger.warning(
                "S-OMP skipped atom %d: collinear with the current support",
                index,
            )
            skipped.append(index)
            continue
        support.append(index)
        q = np.hstack([q, (remainder / norm)[:, None]])
        size = len(support)
        grown = np.zeros((size, size))
        grown[: size - 1, : size - 1] = r
        grown[: size - 1, size - 1] = projection
        grown[size - 1, size - 1] = norm
        r = grown
        residual = signals - q @ (q.T @ signals)
        history.append(float(np.linalg.norm(residual)))

    if support:
        coefficients = scipy.linalg.solve_triangular(r, q.T @ signals)
    else:
        coefficients = np.zeros((0, channels))
    return HscSparseCode(
        np.array(support, dtype=np.int64),
        coefficients.reshape(len(support), channels),
        tuple(history),
        tuple(skipped),
    )


def reconstruct(dictionary: HscDictionary, code: HscSparseCode) -> np.ndarray:
    """U = D_S Gamma, one column per channel."""
    channels = code.coefficients.shape[1] if code.coefficients.ndim == 2 else 3
    if code.k == 0:
        return np.zeros((dictionary.n, channels))
    if code.support.min() < 0 or code.support.max() >= dictionary.m:
        raise HscUsageError(
            f"support index out of range [0, {dictionary.m})"
        )
    return dictionary.atoms[:, code.support] @ code.coefficients
