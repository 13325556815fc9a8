import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.error import HscUsageError
from hsc.codec.hsc_quantize import (
    channel_ranges,
    dequantize,
    float32_ceil,
    float32_floor,
    quantize,
)


def test_constant_channel_dequantizes_exactly():
    coefficients = np.array([[0.25, 1.0, -3.0], [0.25, 2.0, -3.0]])
    for bits in (2, 12, 32):
        values = dequantize(quantize(coefficients, bits))
        assert np.all(values[:, 0] == 0.25)
        assert np.all(values[:, 2] == -3.0)


def test_bypass_is_float32_rounding():
    coefficients = np.random.default_rng(0).normal(size=(50, 3)) * 1e3
    quantized = quantize(coefficients, 32)
    assert quantized.bypass
    expected = coefficients.astype(np.float32).astype(np.float64)
    assert np.array_equal(dequantize(quantized), expected)


@pytest.mark.parametrize("bits", [2, 8, 12, 20])
def test_error_is_at_most_half_a_step(bits):
    coefficients = np.random.default_rng(bits).normal(size=(200, 3))
    quantized = quantize(coefficients, bits)
    assert quantized.codes.max() < 2**bits
    error = np.abs(dequantize(quantized) - coefficients)
    for c in range(3):
        low, high = quantized.ranges[c].astype(np.float64)
        assert low <= coefficients[:, c].min()
        assert high >= coefficients[:, c].max()
        half_step = (high - low) / 2 ** (bits + 1)
        assert error[:, c].max() <= half_step * (1 + 1e-9)


def test_twelve_bit_bound_against_channel_extent():
    coefficients = np.random.default_rng(12).normal(size=(300, 3))
    error = np.abs(dequantize(quantize(coefficients, 12)) - coefficients)
    extent = coefficients.max(axis=0) - coefficients.min(axis=0)
    assert np.all(error.max(axis=0) <= extent / 2**12 / 2 * (1 + 1e-5))


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=-1e30, max_value=1e30, allow_nan=False),
)
def test_float32_bracketing(value):
    assert float(float32_floor(value)) <= value <= float(float32_ceil(value))


def test_channel_ranges():
    assert channel_ranges(np.zeros((0, 3))).tolist() == [[0, 0]] * 3
    ranges = channel_ranges(np.array([[0.1], [0.7]]))
    assert ranges[0, 0] <= 0.1 and ranges[0, 1] >= 0.7
    assert ranges.dtype == np.float32


def test_empty_code():
    quantized = quantize(np.zeros((0, 3)), 12)
    assert dequantize(quantized).shape == (0, 3)


def test_bits_out_of_range():
    for bits in (0, 1, 33):
        with pytest.raises(HscUsageError):
            quantize(np.zeros((1, 3)), bits)


def main():
    test_constant_channel_dequantizes_exactly()
    test_bypass_is_float32_rounding()
    test_error_is_at_most_half_a_step(12)


if __name__ == "__main__":
    main()
