"""
# Coefficient quantizer

Uniform scalar quantization per channel (column) over that channel's
[min, max] with 2**bits cells; a value in cell q dequantizes to the cell's
midpoint, so the error is at most half a cell. The range endpoints travel as
float32, so they are widened outward to the nearest float32 before the cells
are laid out.

bits == 32 bypasses quantization: the codes are the float32 bit patterns of
the coefficients.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from hsc.error import HscUsageError

BYPASS_BITS = 32


@dataclass(frozen=True)
class HscQuantizedCoefficients:
    """`codes` is (k, channels) uint32; `ranges` is (channels, 2) float32
    (min, max) per channel."""

    codes: np.ndarray
    ranges: np.ndarray
    bits: int

    @property
    def bypass(self) -> bool:
        return self.bits == BYPASS_BITS

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            bits=self.bits,
            shape=list(self.codes.shape),
            ranges=self.ranges.tolist(),
        )


def float32_floor(value: float) -> np.float32:
    rounded = np.float32(value)
    if float(rounded) > value:
        rounded = np.nextafter(rounded, np.float32(-np.inf))
    return rounded


def float32_ceil(value: float) -> np.float32:
    rounded = np.float32(value)
    if float(rounded) < value:
        rounded = np.nextafter(rounded, np.float32(np.inf))
    return rounded


def channel_ranges(coefficients: np.ndarray) -> np.ndarray:
    channels = coefficients.shape[1]
    ranges = np.zeros((channels, 2), dtype=np.float32)
    if coefficients.shape[0] == 0:
        return ranges
    for c in range(channels):
        low, high = coefficients[:, c].min(), coefficients[:, c].max()
        if low == high:
            ranges[c] = np.float32(low)
        else:
            ranges[c] = (float32_floor(low), float32_ceil(high))
    return ranges


def quantize(coefficients: np.ndarray, bits: int) -> HscQuantizedCoefficients:
    if bits not in range(2, BYPASS_BITS + 1):
        raise HscUsageError(f"quantizer bits must be in [2, 32], got {bits}")
    coefficients = np.asarray(coefficients, dtype=np.float64)
    if coefficients.ndim == 1:
        coefficients = coefficients[:, None]
    ranges = channel_ranges(coefficients)
    if bits == BYPASS_BITS:
        codes = coefficients.astype(np.float32).view(np.uint32)
        return HscQuantizedCoefficients(codes.copy(), ranges, bits)
    levels = 1 << bits
    codes = np.zeros(coefficients.shape, dtype=np.uint32)
    for c in range(coefficients.shape[1]):
        low, high = float(ranges[c, 0]), float(ranges[c, 1])
        if high == low:
            continue
        step = (high - low) / levels
        cell = np.floor((coefficients[:, c] - low) / step)
        codes[:, c] = np.clip(cell, 0, levels - 1).astype(np.uint32)
    return HscQuantizedCoefficients(codes, ranges, bits)


def dequantize(quantized: HscQuantizedCoefficients) -> np.ndarray:
    codes = quantized.codes
    if quantized.bypass:
        return codes.astype(np.uint32).view(np.float32).astype(np.float64)
    levels = 1 << quantized.bits
    values = np.zeros(codes.shape, dtype=np.float64)
    for c in range(codes.shape[1]):
        low = float(quantized.ranges[c, 0])
        high = float(quantized.ranges[c, 1])
        if high == low:
            values[:, c] = low
            continue
        step = (high - low) / levels
        values[:, c] = low + (codes[:, c].astype(np.float64) + 0.5) * step
    return values
