from dataclasses import asdict, dataclass
from enum import Enum, unique
from typing import Any, Dict, Optional, Tuple

import numpy as np

from hsc.error import HscUsageError
from hsc.graph.hsc_partition import DEFAULT_BLOCK_SIZE

MAX_BLOCK_SIZE = 32767
DEFAULT_MU_GRID_POINTS = 12
DEFAULT_MU_GRID_SPAN = (1e-2, 1e3)
# ham-trunc keeps a single basis and also searches weak potentials.
TRUNCATION_MU_GRID_POINTS = 17
TRUNCATION_MU_GRID_SPAN = (1e-5, 1e3)


@unique
class HscPotentialPlacement(Enum):
    # The error-sorted permutation travels as a side record.
    SIDE_RECORD = "side-record"
    # The transmitted vertex order itself is the error-sorted order.
    IN_PLACE = "in-place"


@dataclass(frozen=True)
class HscEncoderConfig:
    target_ratio: float
    block_size: int = DEFAULT_BLOCK_SIZE
    mu_grid: Optional[Tuple[float, ...]] = None
    max_subdicts: int = 4
    improvement_tolerance: float = 1e-3
    coefficient_bits: int = 32
    coordinate_bits: int = 32
    mu_bits: int = 32
    potential_placement: HscPotentialPlacement = (
        HscPotentialPlacement.SIDE_RECORD
    )
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.target_ratio <= 1.0:
            raise HscUsageError(
                f"target ratio must be in (0, 1], got {self.target_ratio}"
            )
        if self.block_size not in range(1, MAX_BLOCK_SIZE + 1):
            raise HscUsageError(
                f"block size must be in [1, {MAX_BLOCK_SIZE}], got {self.block_size}"
            )
        if self.max_subdicts < 0 or self.max_subdicts > 255:
            raise HscUsageError(
                f"max sub-dictionaries must be in [0, 255], got {self.max_subdicts}"
            )
        if self.improvement_tolerance < 0.0:
            raise HscUsageError("improvement tolerance must be nonnegative")
        if self.coefficient_bits not in range(2, 33):
            raise HscUsageError(
                f"coefficient bits must be in [2, 32], got {self.coefficient_bits}"
            )
        if self.coordinate_bits < 1:
            raise HscUsageError("coordinate bits must be positive")
        if self.mu_bits != 32:
            raise HscUsageError("mu values are serialized as 32-bit floats")
        if self.workers < 1:
            raise HscUsageError("workers must be positive")
        if self.mu_grid is not None:
            grid = tuple(float(mu) for mu in self.mu_grid)
            if not grid:
                raise HscUsageError("mu grid must not be empty")
            if any(mu <= 0.0 or not np.isfinite(mu) for mu in grid):
                raise HscUsageError("mu grid values must be positive")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise HscUsageError("mu grid must be strictly increasing")
            object.__setattr__(self, "mu_grid", grid)
        object.__setattr__(
            self,
            "potential_placement",
            HscPotentialPlacement(self.potential_placement),
        )

    @property
    def full_rate(self) -> bool:
        return self.target_ratio >= 1.0

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["potential_placement"] = self.potential_placement.value
        return d


def float32_values(values) -> Tuple[float, ...]:
    """Values as they survive a round trip through the container."""
    return tuple(float(v) for v in np.asarray(values, dtype=np.float32))


def default_mu_grid(
    mean_eigenvalue: float,
    span: Tuple[float, float] = DEFAULT_MU_GRID_SPAN,
    points: int = DEFAULT_MU_GRID_POINTS,
) -> Tuple[float, ...]:
    """Log-spaced points on `span` (12 on [1e-2, 1e3] by default) times the
    block's mean Laplacian eigenvalue, rounded to float32 so the decoder sees
    the same values."""
    scale = mean_eigenvalue if mean_eigenvalue > 0.0 else 1.0
    low, high = span
    return float32_values(np.geomspace(low * scale, high * scale, points))


def truncation_mu_grid(mean_eigenvalue: float) -> Tuple[float, ...]:
    return default_mu_grid(
        mean_eigenvalue, TRUNCATION_MU_GRID_SPAN, TRUNCATION_MU_GRID_POINTS
    )


def block_mu_grid(
    config: HscEncoderConfig, mean_eigenvalue: float, truncation: bool = False
) -> Tuple[float, ...]:
    """The grid searched on one block: the configured grid, or the default
    one (the truncation default for ham-trunc) scaled to the block's
    spectrum. Values are float32 and distinct."""
    if config.mu_grid is None and truncation:
        grid = truncation_mu_grid(mean_eigenvalue)
    elif config.mu_grid is None:
        grid = default_mu_grid(mean_eigenvalue)
    else:
        grid = float32_values(config.mu_grid)
    return tuple(sorted(set(grid)))
