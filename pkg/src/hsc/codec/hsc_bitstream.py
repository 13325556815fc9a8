"""
# Bit streams

Little-endian, least-significant-bit-first packing: bit i of a value lands
in bit (position + i) of the stream, and bit p of the stream is bit p % 8 of
byte p // 8. Byte-aligned u16/u32 fields therefore read back as ordinary
little-endian integers.

Every write is tallied under a category so the container can report header,
connectivity, side-information, payload and padding bits separately.
"""

from collections import Counter
from enum import Enum, auto, unique

import numpy as np

from hsc.error import HscFormatError


@unique
class HscBitCategory(Enum):
    HEADER = auto()
    CONNECTIVITY = auto()
    SIDE = auto()
    PAYLOAD = auto()
    PADDING = auto()


class BitWriter:
    def __init__(self):
        self._buffer = bytearray()
        self._accumulator = 0
        self._pending = 0
        self.tally: Counter = Counter()

    @property
    def position(self) -> int:
        return 8 * len(self._buffer) + self._pending

    def write(self, value: int, bits: int, category: HscBitCategory):
        if bits == 0:
            return
        assert 0 <= value < (1 << bits), f"{value} does not fit in {bits} bits"
        self._accumulator |= value << self._pending
        self._pending += bits
        while self._pending >= 8:
            self._buffer.append(self._accumulator & 0xFF)
            self._accumulator >>= 8
            self._pending -= 8
        self.tally[category] += bits

    def write_f32(self, value: float, category: HscBitCategory):
        pattern = int(np.array([value], dtype=np.float32).view(np.uint32)[0])
        self.write(pattern, 32, category)

    def write_varint(self, value: int, category: HscBitCategory):
        """Unsigned LEB128: 7 bits per byte, high bit set on all but the last."""
        assert value >= 0
        while True:
            byte = value & 0x7F
            value >>= 7
            if value:
                self.write(byte | 0x80, 8, category)
            else:
                self.write(byte, 8, category)
                return

    def align(self):
        if self._pending:
            self.write(0, 8 - self._pending, HscBitCategory.PADDING)

    def getvalue(self) -> bytes:
        assert self._pending == 0, "stream is not byte aligned"
        return bytes(self._buffer)


class BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self._position = 0

    @property
    def position(self) -> int:
        return self._position

    @property
    def remaining(self) -> int:
        return 8 * len(self._data) - self._position

    def read(self, bits: int) -> int:
        if bits == 0:
            return 0
        if bits > self.remaining:
            raise HscFormatError(
                f"truncated container: needed {bits} bits at bit {self._position}, "
                f"{self.remaining} left"
            )
        first = self._position >> 3
        last = (self._position + bits + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "little")
        value = (chunk >> (self._position & 7)) & ((1 << bits) - 1)
        self._position += bits
        return value

    def read_f32(self) -> float:
        pattern = np.array([self.read(32)], dtype=np.uint32)
        return float(pattern.view(np.float32)[0])

    def read_varint(self) -> int:
        value, shift = 0, 0
        while True:
            byte = self.read(8)
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 35:
                raise HscFormatError("varint longer than 5 bytes")

    def align(self):
        self._position = min(
            (self._position + 7) & ~7, 8 * len(self._data)
        )
