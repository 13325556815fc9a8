import numpy as np
import pytest
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.codec.hsc_bitstream import BitReader, BitWriter, HscBitCategory
from hsc.codec.hsc_codec import encode
from hsc.codec.hsc_config import HscEncoderConfig, HscPotentialPlacement
from hsc.codec.hsc_container import (
    FORMAT_VERSION,
    MAGIC,
    HscCompressedBlock,
    HscCompressedMesh,
    deserialize,
    serialize,
    write_container,
)
from hsc.codec.hsc_quantize import quantize
from hsc.codec.hsc_truncation import encode_truncation
from hsc.error import HscFormatError
from hsc.meshio.hsc_synthetic import random_mesh

HEADER_BITS = 8 * len(MAGIC) + 16 + 32 + 32 + 16 + 8 + 8


def small_config(**kwargs) -> HscEncoderConfig:
    settings = dict(target_ratio=0.3, block_size=20, coefficient_bits=12)
    settings.update(kwargs)
    return HscEncoderConfig(**settings)


def assert_same_blocks(a: HscCompressedMesh, b: HscCompressedMesh):
    assert a.n_vertices == b.n_vertices
    assert np.array_equal(a.faces, b.faces)
    assert a.block_size == b.block_size
    assert a.coefficient_bits == b.coefficient_bits
    assert a.placement == b.placement
    assert a.truncated == b.truncated
    assert len(a.blocks) == len(b.blocks)
    for x, y in zip(a.blocks, b.blocks):
        assert x.n == y.n
        assert x.mus == y.mus
        assert np.array_equal(x.support, y.support)
        assert np.array_equal(x.quantized.codes, y.quantized.codes)
        assert np.array_equal(x.quantized.ranges, y.quantized.ranges)
        if x.permutation is None:
            assert y.permutation is None
        else:
            assert np.array_equal(x.permutation, y.permutation)


def single_block_stream(
    support: np.ndarray, n: int = 3
) -> HscCompressedMesh:
    """A fan of n - 2 triangles in one block of a 32-bit sparse stream."""
    block = HscCompressedBlock(
        block_id=0,
        n=n,
        mus=(),
        support=support,
        quantized=quantize(np.ones((support.shape[0], 3)), 32),
    )
    return HscCompressedMesh(
        n_vertices=n,
        faces=np.array([[0, i, i + 1] for i in range(1, n - 1)]),
        block_size=300,
        coefficient_bits=32,
        placement=HscPotentialPlacement.SIDE_RECORD,
        truncated=False,
        blocks=(block,),
    )


################################################################################
### BIT STREAMS
################################################################################


def test_bits_are_packed_lsb_first():
    writer = BitWriter()
    writer.write(1, 1, HscBitCategory.PAYLOAD)
    writer.write(0b101, 3, HscBitCategory.PAYLOAD)
    writer.write(0xABCD, 16, HscBitCategory.SIDE)
    writer.align()
    data = writer.getvalue()
    assert data[0] & 0x0F == 0b1011
    assert writer.tally == {
        HscBitCategory.SIDE: 16,
        HscBitCategory.PAYLOAD: 4,
        HscBitCategory.PADDING: 4,
    }
    reader = BitReader(data)
    assert reader.read(1) == 1
    assert reader.read(3) == 0b101
    assert reader.read(16) == 0xABCD


def test_aligned_fields_are_little_endian():
    writer = BitWriter()
    writer.write(0x01020304, 32, HscBitCategory.HEADER)
    assert writer.getvalue() == bytes([4, 3, 2, 1])


def test_varint_and_float():
    writer = BitWriter()
    writer.write_varint(300, HscBitCategory.CONNECTIVITY)
    writer.write_varint(0, HscBitCategory.CONNECTIVITY)
    writer.write_f32(1.5, HscBitCategory.SIDE)
    data = writer.getvalue()
    assert data[:3] == bytes([0xAC, 0x02, 0x00])
    reader = BitReader(data)
    assert reader.read_varint() == 300
    assert reader.read_varint() == 0
    assert reader.read_f32() == 1.5
    assert reader.remaining == 0


def test_reader_errors():
    with pytest.raises(HscFormatError, match="truncated"):
        BitReader(b"\x01").read(9)
    with pytest.raises(HscFormatError, match="varint"):
        BitReader(b"\xff" * 8).read_varint()


################################################################################
### CONTAINER
################################################################################


@pytest.mark.parametrize("placement", list(HscPotentialPlacement))
def test_sparse_stream_round_trip(placement):
    config = small_config(potential_placement=placement)
    compressed = encode(random_mesh(3, max_vertices=80), config)
    data, stats = write_container(compressed)
    assert stats.total_bits == 8 * len(data)
    assert stats.header_bits == HEADER_BITS
    assert stats.payload_bits == compressed.payload_bits()
    assert stats.padding_bits < 8
    again = deserialize(data)
    assert_same_blocks(compressed, again)
    assert again.compression_ratio() == pytest.approx(
        compressed.compression_ratio()
    )
    assert serialize(again) == data


@pytest.mark.parametrize("use_hamiltonian", [False, True])
def test_truncation_stream_round_trip(use_hamiltonian):
    compressed = encode_truncation(
        random_mesh(4, max_vertices=80), small_config(), use_hamiltonian
    )
    data = serialize(compressed)
    again = deserialize(data)
    assert again.truncated
    assert_same_blocks(compressed, again)
    for block in again.blocks:
        assert block.support.tolist() == list(range(block.k))


def test_header_fields():
    compressed = encode(random_mesh(5, max_vertices=60), small_config())
    data = serialize(compressed)
    assert data[:4] == MAGIC
    assert int.from_bytes(data[4:6], "little") == FORMAT_VERSION
    assert int.from_bytes(data[6:10], "little") == compressed.n_vertices
    assert int.from_bytes(data[10:14], "little") == compressed.faces.shape[0]
    assert int.from_bytes(data[14:16], "little") == 20
    assert data[16] == 12
    assert data[17] == 0


def test_unsupported_version():
    data = serialize(encode(random_mesh(5, max_vertices=60), small_config()))
    with pytest.raises(HscFormatError, match="unsupported version"):
        deserialize(b"HSC2" + data[4:])
    bumped = data[:4] + (FORMAT_VERSION + 1).to_bytes(2, "little") + data[6:]
    with pytest.raises(HscFormatError, match="unsupported version"):
        deserialize(bumped)
    with pytest.raises(HscFormatError, match="not an hsc container"):
        deserialize(b"OFF\n" + data[4:])


def test_truncated_and_padded_data():
    data = serialize(encode(random_mesh(6, max_vertices=60), small_config()))
    for cut in (0, 3, 17, len(data) // 2, len(data) - 1):
        with pytest.raises(HscFormatError):
            deserialize(data[:cut])
    with pytest.raises(HscFormatError, match="trailing"):
        deserialize(data + b"\x00")


def test_unknown_flags_and_bits():
    data = bytearray(serialize(single_block_stream(np.array([1]))))
    bad_flags = bytes(data[:17]) + b"\x80" + bytes(data[18:])
    with pytest.raises(HscFormatError, match="flags"):
        deserialize(bad_flags)
    bad_bits = bytes(data[:16]) + b"\x01" + bytes(data[17:])
    with pytest.raises(HscFormatError, match="coefficient bits"):
        deserialize(bad_bits)


def test_support_index_out_of_range():
    # m = 3 atoms take 2-bit indices, so index 3 is representable but invalid.
    data = serialize(single_block_stream(np.array([3])))
    with pytest.raises(HscFormatError, match="support index 3"):
        deserialize(data)


def test_repeated_support_index():
    data = serialize(single_block_stream(np.array([1, 1]), n=4))
    with pytest.raises(HscFormatError, match="repeats"):
        deserialize(data)


def test_face_out_of_range():
    compressed = single_block_stream(np.array([0]))
    data = bytearray(serialize(compressed))
    # Connectivity starts right after the 18-byte header; one byte per index.
    data[18 + 2] = 5
    with pytest.raises(HscFormatError, match="connectivity"):
        deserialize(bytes(data))


def main():
    test_bits_are_packed_lsb_first()
    test_varint_and_float()
    test_sparse_stream_round_trip(HscPotentialPlacement.SIDE_RECORD)
    test_unsupported_version()
    test_support_index_out_of_range()


if __name__ == "__main__":
    main()
