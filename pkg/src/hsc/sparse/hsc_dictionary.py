from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from hsc.error import HscUsageError
from hsc.spectral.hsc_spectral import HscSpectralBasis


@dataclass(frozen=True)
class HscDictionary:
    """n x m matrix of unit-norm atoms. `provenance[j]` is the pair
    (sub-dictionary id, eigen index) of atom j."""

    atoms: np.ndarray
    provenance: np.ndarray

    @property
    def n(self) -> int:
        return int(self.atoms.shape[0])

    @property
    def m(self) -> int:
        return int(self.atoms.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return dict(metatype=self.__class__.__name__, n=self.n, m=self.m)


def build_dictionary(bases: Sequence[HscSpectralBasis]) -> HscDictionary:
    """D = [B_0, B_1, ...] with columns in list order."""
    if not bases:
        raise HscUsageError("a dictionary needs at least one basis")
    n = bases[0].vectors.shape[0]
    for s, basis in enumerate(bases):
        if basis.vectors.shape[0] != n:
            raise HscUsageError(
                f"basis {s} has dimension {basis.vectors.shape[0]}, expected {n}"
            )
    atoms = np.hstack([basis.vectors for basis in bases])
    norms = np.linalg.norm(atoms, axis=0)
    norms[norms == 0.0] = 1.0
    atoms = atoms / norms
    provenance = np.array(
        [
            (s, j)
            for s, basis in enumerate(bases)
            for j in range(basis.vectors.shape[1])
        ],
        dtype=np.int64,
    ).reshape(-1, 2)
    atoms.setflags(write=False)
    provenance.setflags(write=False)
    return HscDictionary(atoms, provenance)
