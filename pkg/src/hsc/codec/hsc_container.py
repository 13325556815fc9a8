"""
# Container (.hsc)

Little-endian, LSB-first bit packing (see `hsc_bitstream`). Layout:

    magic "HSC1" | version u16
    header       n u32 | f u32 | block_size u16 | k_d u8 | flags u8
    connectivity 3 f unsigned LEB128 varints (face triples)
    blocks       in ascending block id, bit packed, no alignment between
    padding      zero bits up to the next byte

flags: bit 0 = in-place placement, bit 1 = truncation stream.

Block record:

    k u16 | n_mu u8 | mu f32 x n_mu
    side-record, n_mu > 0:  permutation, n u16 deltas (mod n), first absolute
    in-place:               block size u16
    sparse streams:         selector bit (1 = bit vector) | support
    ranges (min, max) f32 x 3
    coefficients k rows x (X, Y, Z) at k_d bits each

The geometry payload (mu values, support, coefficients) is exactly the
numerator of the compression ratio; everything else is tallied as header,
connectivity or side information.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from hsc.codec.hsc_bitstream import BitReader, BitWriter, HscBitCategory
from hsc.codec.hsc_config import HscPotentialPlacement
from hsc.codec.hsc_quantize import HscQuantizedCoefficients
from hsc.codec.hsc_rate import (
    HscCompressionBudget,
    index_bits,
    total_ratio,
    use_bit_vector,
)
from hsc.error import HscFormatError
from hsc.graph.hsc_graph import build_adjacency_from_faces
from hsc.graph.hsc_partition import partition
from hsc.meshio.hsc_mesh import HscMesh

logger = logging.getLogger(__name__)

MAGIC = b"HSC1"
MAGIC_FAMILY = b"HSC"
FORMAT_VERSION = 1
MU_BITS = 32
RANGE_BITS = 32
FLAG_IN_PLACE = 0x01
FLAG_TRUNCATION = 0x02

frozen_dataclass = dataclass(frozen=True)


################################################################################
### DATA TYPES
################################################################################


@frozen_dataclass
class HscCompressedBlock:
    """One block's record. `support` is in stream order (ascending when the
    bit vector is used, selection order otherwise; `arange(k)` in truncation
    streams) and `quantized.codes` rows follow it. `permutation[i]` is the
    local vertex that carries the i-th smallest potential value."""

    block_id: int
    n: int
    mus: Tuple[float, ...]
    support: np.ndarray
    quantized: HscQuantizedCoefficients
    permutation: Optional[np.ndarray] = None
    truncated: bool = False

    @property
    def k(self) -> int:
        return int(self.support.shape[0])

    @property
    def n_mu(self) -> int:
        return len(self.mus)

    @property
    def m(self) -> int:
        if self.truncated:
            return self.n
        return (1 + self.n_mu) * self.n

    def budget(self, coordinate_bits: int = 32) -> HscCompressionBudget:
        return HscCompressionBudget(
            n=self.n,
            k=coordinate_bits,
            n_d=self.k,
            k_d=self.quantized.bits,
            m=None if self.truncated else self.m,
            n_mu=self.n_mu,
            k_mu=MU_BITS,
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            block_id=self.block_id,
            n=self.n,
            k=self.k,
            mus=list(self.mus),
            m=self.m,
            truncated=self.truncated,
        )


@frozen_dataclass
class HscCompressedMesh:
    """Everything `serialize` writes, plus two encoder-side fields that are
    never serialized: `coordinate_bits` (the raw precision the ratio is
    measured against) and `vertex_order` (in-place streams only: transmitted
    index -> original index)."""

    n_vertices: int
    faces: np.ndarray
    block_size: int
    coefficient_bits: int
    placement: HscPotentialPlacement
    truncated: bool
    blocks: Tuple[HscCompressedBlock, ...]
    coordinate_bits: int = 32
    vertex_order: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def flags(self) -> int:
        flags = 0
        if self.placement == HscPotentialPlacement.IN_PLACE:
            flags |= FLAG_IN_PLACE
        if self.truncated:
            flags |= FLAG_TRUNCATION
        return flags

    def budgets(self) -> List[HscCompressionBudget]:
        return [block.budget(self.coordinate_bits) for block in self.blocks]

    def compression_ratio(self) -> float:
        return total_ratio(self.budgets())

    def payload_bits(self) -> int:
        return sum(budget.encoded_bits() for budget in self.budgets())

    def block_orders(self) -> List[np.ndarray]:
        """Global (transmitted) vertex indices of each block, local order."""
        if self.placement == HscPotentialPlacement.IN_PLACE:
            bounds = np.cumsum([0] + [block.n for block in self.blocks])
            return [
                np.arange(bounds[b], bounds[b + 1])
                for b in range(len(self.blocks))
            ]
        return list(
            block_partition(self.n_vertices, self.faces, self.block_size)
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            n_vertices=self.n_vertices,
            n_faces=int(self.faces.shape[0]),
            block_size=self.block_size,
            coefficient_bits=self.coefficient_bits,
            placement=self.placement.value,
            truncated=self.truncated,
            blocks=[block.to_dict() for block in self.blocks],
        )


@frozen_dataclass
class HscStreamStats:
    header_bits: int
    connectivity_bits: int
    side_bits: int
    payload_bits: int
    padding_bits: int

    @property
    def total_bits(self) -> int:
        return (
            self.header_bits
            + self.connectivity_bits
            + self.side_bits
            + self.payload_bits
            + self.padding_bits
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            header_bits=self.header_bits,
            connectivity_bits=self.connectivity_bits,
            side_bits=self.side_bits,
            payload_bits=self.payload_bits,
            padding_bits=self.padding_bits,
            total_bits=self.total_bits,
        )


def block_partition(n_vertices: int, faces: np.ndarray, block_size: int):
    """The partition both sides derive from connectivity alone."""
    graph = build_adjacency_from_faces(n_vertices, faces)
    return partition(graph, block_size).blocks


################################################################################
### WRITER
################################################################################


def write_permutation(writer: BitWriter, permutation: np.ndarray):
    n = permutation.shape[0]
    previous = 0
    for index in permutation.tolist():
        writer.write((index - previous) % n, 16, HscBitCategory.SIDE)
        previous = index


def write_support(writer: BitWriter, block: HscCompressedBlock):
    m, k = block.m, block.k
    bit_vector = use_bit_vector(m, k)
    writer.write(int(bit_vector), 1, HscBitCategory.SIDE)
    if bit_vector:
        assert np.all(
            np.diff(block.support) > 0
        ), "bit vector needs sorted support"
        mask = np.zeros(m, dtype=np.uint8)
        mask[block.support] = 1
        # The mask goes out 8 bits at a time, LSB first.
        packed = np.packbits(mask, bitorder="little")
        full, tail = divmod(m, 8)
        for byte in packed[:full].tolist():
            writer.write(byte, 8, HscBitCategory.PAYLOAD)
        if tail:
            writer.write(int(packed[full]), tail, HscBitCategory.PAYLOAD)
    else:
        width = index_bits(m)
        for index in block.support.tolist():
            writer.write(index, width, HscBitCategory.PAYLOAD)


def write_block(
    writer: BitWriter, block: HscCompressedBlock, compressed: HscCompressedMesh
):
    writer.write(block.k, 16, HscBitCategory.SIDE)
    writer.write(block.n_mu, 8, HscBitCategory.SIDE)
    for mu in block.mus:
        writer.write_f32(mu, HscBitCategory.PAYLOAD)
    if compressed.placement == HscPotentialPlacement.IN_PLACE:
        writer.write(block.n, 16, HscBitCategory.SIDE)
    elif block.n_mu > 0:
        write_permutation(writer, block.permutation)
    if not compressed.truncated:
        write_support(writer, block)
    for low, high in block.quantized.ranges.tolist():
        writer.write_f32(low, HscBitCategory.SIDE)
        writer.write_f32(high, HscBitCategory.SIDE)
    bits = block.quantized.bits
    for value in block.quantized.codes.reshape(-1).tolist():
        writer.write(value, bits, HscBitCategory.PAYLOAD)


def write_container(
    compressed: HscCompressedMesh,
) -> Tuple[bytes, HscStreamStats]:
    writer = BitWriter()
    for byte in MAGIC:
        writer.write(byte, 8, HscBitCategory.HEADER)
    writer.write(FORMAT_VERSION, 16, HscBitCategory.HEADER)
    writer.write(compressed.n_vertices, 32, HscBitCategory.HEADER)
    writer.write(int(compressed.faces.shape[0]), 32, HscBitCategory.HEADER)
    writer.write(compressed.block_size, 16, HscBitCategory.HEADER)
    writer.write(compressed.coefficient_bits, 8, HscBitCategory.HEADER)
    writer.write(compressed.flags, 8, HscBitCategory.HEADER)

    for index in compressed.faces.reshape(-1).tolist():
        writer.write_varint(index, HscBitCategory.CONNECTIVITY)

    for block in compressed.blocks:
        write_block(writer, block, compressed)
    writer.align()

    tally = writer.tally
    stats = HscStreamStats(
        header_bits=tally[HscBitCategory.HEADER],
        connectivity_bits=tally[HscBitCategory.CONNECTIVITY],
        side_bits=tally[HscBitCategory.SIDE],
        payload_bits=tally[HscBitCategory.PAYLOAD],
        padding_bits=tally[HscBitCategory.PADDING],
    )
    assert stats.payload_bits == compressed.payload_bits()
    logger.debug("container bits: %s", stats.to_dict())
    return writer.getvalue(), stats


def serialize(compressed: HscCompressedMesh) -> bytes:
    data, _ = write_container(compressed)
    return data


################################################################################
### READER
################################################################################


def read_header(reader: BitReader) -> Dict[str, int]:
    magic = bytes(reader.read(8) for _ in range(4))
    if magic != MAGIC:
        if magic[:3] == MAGIC_FAMILY:
            raise HscFormatError(
                f"unsupported version: container magic {magic!r}, expected {MAGIC!r}"
            )
        raise HscFormatError(f"not an hsc container (magic {magic!r})")
    version = reader.read(16)
    if version != FORMAT_VERSION:
        raise HscFormatError(
            f"unsupported version: format {version}, expected {FORMAT_VERSION}"
        )
    return dict(
        n=reader.read(32),
        f=reader.read(32),
        block_size=reader.read(16),
        coefficient_bits=reader.read(8),
        flags=reader.read(8),
    )


def read_permutation(reader: BitReader, n: int) -> np.ndarray:
    permutation = np.zeros(n, dtype=np.int64)
    previous = 0
    for i in range(n):
        delta = reader.read(16)
        if delta >= n:
            raise HscFormatError(
                f"permutation delta {delta} out of range [0, {n})"
            )
        previous = (previous + delta) % n
        permutation[i] = previous
    if np.any(np.bincount(permutation, minlength=n) != 1):
        raise HscFormatError("permutation record is not a permutation")
    return permutation


def read_support(reader: BitReader, m: int, k: int) -> np.ndarray:
    if reader.read(1):
        full, tail = divmod(m, 8)
        packed = [reader.read(8) for _ in range(full)]
        if tail:
            packed.append(reader.read(tail))
        mask = np.unpackbits(
            np.array(packed, dtype=np.uint8), count=m, bitorder="little"
        )
        support = np.flatnonzero(mask).astype(np.int64)
        if support.shape[0] != k:
            raise HscFormatError(
                f"support bit vector selects {support.shape[0]} atoms, expected {k}"
            )
        return support
    width = index_bits(m)
    support = np.array([reader.read(width) for _ in range(k)], dtype=np.int64)
    if support.size and support.max() >= m:
        raise HscFormatError(
            f"support index {int(support.max())} out of range [0, {m})"
        )
    if np.unique(support).shape[0] != k:
        raise HscFormatError("support repeats an atom")
    return support


def read_block(
    reader: BitReader,
    block_id: int,
    n: Optional[int],
    header: Dict[str, int],
) -> HscCompressedBlock:
    """`n` is None for in-place streams, where the record carries the size."""
    in_place = bool(header["flags"] & FLAG_IN_PLACE)
    truncated = bool(header["flags"] & FLAG_TRUNCATION)
    k = reader.read(16)
    n_mu = reader.read(8)
    mus = tuple(reader.read_f32() for _ in range(n_mu))
    if not all(np.isfinite(mu) and mu >= 0.0 for mu in mus):
        raise HscFormatError(f"block {block_id}: invalid mu value")
    if truncated and n_mu > 1:
        raise HscFormatError(
            f"block {block_id}: truncation block with {n_mu} mus"
        )
    permutation = None
    if in_place:
        n = reader.read(16)
        if n == 0:
            raise HscFormatError(f"block {block_id}: empty block")
    elif n_mu > 0:
        permutation = read_permutation(reader, n)
    if k > n:
        raise HscFormatError(f"block {block_id}: k={k} exceeds block size {n}")
    m = n if truncated else (1 + n_mu) * n
    if truncated:
        support = np.arange(k, dtype=np.int64)
    else:
        support = read_support(reader, m, k)
    ranges = np.array(
        [reader.read_f32() for _ in range(6)], dtype=np.float32
    ).reshape(3, 2)
    bits = header["coefficient_bits"]
    codes = np.array(
        [reader.read(bits) for _ in range(3 * k)], dtype=np.uint32
    ).reshape(k, 3)
    return HscCompressedBlock(
        block_id=block_id,
        n=n,
        mus=mus,
        support=support,
        quantized=HscQuantizedCoefficients(codes, ranges, bits),
        permutation=permutation,
        truncated=truncated,
    )


def deserialize(data: bytes) -> HscCompressedMesh:
    reader = BitReader(data)
    header = read_header(reader)
    n, f = header["n"], header["f"]
    if header["block_size"] < 1:
        raise HscFormatError("block size must be positive")
    if header["coefficient_bits"] not in range(2, 33):
        raise HscFormatError(
            f"coefficient bits {header['coefficient_bits']} out of range [2, 32]"
        )
    if header["flags"] & ~(FLAG_IN_PLACE | FLAG_TRUNCATION):
        raise HscFormatError(f"unknown flags {header['flags']:#04x}")

    faces = np.array(
        [reader.read_varint() for _ in range(3 * f)], dtype=np.int64
    ).reshape(f, 3)
    try:
        HscMesh(np.zeros((n, 3)), faces)
    except ValueError as e:
        raise HscFormatError(f"invalid connectivity: {e}") from e

    blocks: List[HscCompressedBlock] = []
    if header["flags"] & FLAG_IN_PLACE:
        covered = 0
        while covered < n:
            block = read_block(reader, len(blocks), None, header)
            covered += block.n
            blocks.append(block)
        if covered != n:
            raise HscFormatError(f"block sizes cover {covered} of {n} vertices")
        placement = HscPotentialPlacement.IN_PLACE
    else:
        for block_id, order in enumerate(
            block_partition(n, faces, header["block_size"])
        ):
            blocks.append(read_block(reader, block_id, len(order), header))
        placement = HscPotentialPlacement.SIDE_RECORD

    reader.align()
    if reader.remaining:
        raise HscFormatError(f"{reader.remaining // 8} trailing bytes")
    return HscCompressedMesh(
        n_vertices=n,
        faces=faces,
        block_size=header["block_size"],
        coefficient_bits=header["coefficient_bits"],
        placement=placement,
        truncated=bool(header["flags"] & FLAG_TRUNCATION),
        blocks=tuple(blocks),
    )
