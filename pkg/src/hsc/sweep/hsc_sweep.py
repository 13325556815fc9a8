"""
# Rate-distortion sweep

One row per (method, target ratio) cell: encode, write the stream, read it
back, decode, and score the result against the input. The achieved ratio is
recomputed from the stream that was read back, never from the encoder's
in-memory result.
"""

import csv
import io
import logging
import time
from dataclasses import dataclass, replace
from enum import Enum, unique
from typing import Any, Callable, Dict, List, Sequence

from hsc.codec.hsc_block import map_blocks
from hsc.codec.hsc_codec import decode, encode, restore_original_order
from hsc.codec.hsc_config import HscEncoderConfig
from hsc.codec.hsc_container import HscCompressedMesh, deserialize, serialize
from hsc.codec.hsc_truncation import encode_truncation
from hsc.error import HscUsageError
from hsc.meshio.hsc_mesh import HscMesh
from hsc.metrics.hsc_metrics import visual_error

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "method",
    "target_ratio",
    "achieved_ratio",
    "visual_error",
    "rms",
    "wall_ms",
)


@unique
class HscSweepMethod(Enum):
    MHB_TRUNC = "mhb-trunc"
    HAM_TRUNC = "ham-trunc"
    MHB_SOMP = "mhb-somp"
    HAM_SOMP = "ham-somp"

    @staticmethod
    def parse(name: str) -> "HscSweepMethod":
        try:
            return HscSweepMethod(name)
        except ValueError:
            choices = ", ".join(m.value for m in HscSweepMethod)
            raise HscUsageError(
                f"unknown method '{name}' (choose from {choices})"
            ) from None


@dataclass(frozen=True)
class HscSweepRow:
    method: HscSweepMethod
    target_ratio: float
    achieved_ratio: float
    visual_error: float
    rms: float
    wall_ms: float

    def as_csv_fields(self) -> List[str]:
        return [
            self.method.value,
            f"{self.target_ratio:.6g}",
            f"{self.achieved_ratio:.9g}",
            f"{self.visual_error:.9g}",
            f"{self.rms:.9g}",
            f"{self.wall_ms:.3f}",
        ]

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(CSV_HEADER, self.as_csv_fields()))


ENCODERS: Dict[
    HscSweepMethod, Callable[[HscMesh, HscEncoderConfig], HscCompressedMesh]
] = {
    HscSweepMethod.MHB_TRUNC: lambda mesh, config: encode_truncation(
        mesh, config, use_hamiltonian=False
    ),
    HscSweepMethod.HAM_TRUNC: lambda mesh, config: encode_truncation(
        mesh, config, use_hamiltonian=True
    ),
    HscSweepMethod.MHB_SOMP: lambda mesh, config: encode(
        mesh, replace(config, max_subdicts=0)
    ),
    HscSweepMethod.HAM_SOMP: encode,
}


def run_cell(
    mesh: HscMesh,
    method: HscSweepMethod,
    config: HscEncoderConfig,
    timing: bool = True,
) -> HscSweepRow:
    start = time.perf_counter()
    compressed = ENCODERS[method](mesh, config)
    stream = deserialize(serialize(compressed))
    decoded = restore_original_order(decode(stream), compressed.vertex_order)
    elapsed = (time.perf_counter() - start) * 1000.0
    stream = replace(stream, coordinate_bits=config.coordinate_bits)
    report = visual_error(mesh, decoded)
    row = HscSweepRow(
        method=method,
        target_ratio=config.target_ratio,
        achieved_ratio=stream.compression_ratio(),
        visual_error=report.global_error,
        rms=report.rms,
        wall_ms=elapsed if timing else 0.0,
    )
    logger.info(
        "%s @ %.4g: ratio %.6f, visual %.6g, rms %.6g",
        method.value,
        row.target_ratio,
        row.achieved_ratio,
        row.visual_error,
        row.rms,
    )
    return row


def run_sweep(
    mesh: HscMesh,
    ratios: Sequence[float],
    methods: Sequence[HscSweepMethod],
    config: HscEncoderConfig,
    timing: bool = True,
) -> List[HscSweepRow]:
    """Rows in method-major order (methods as given, ratios as given).
    `config.workers` spreads the cells over threads; each cell itself runs
    single-threaded."""
    if not ratios or not methods:
        raise HscUsageError("a sweep needs at least one ratio and one method")
    cells = [
        (method, replace(config, target_ratio=ratio, workers=1))
        for method in methods
        for ratio in ratios
    ]
    return map_blocks(
        lambda cell: run_cell(mesh, cell[0], cell[1], timing),
        cells,
        config.workers,
    )


def format_sweep_csv(rows: Sequence[HscSweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_fields())
    return buffer.getvalue()
