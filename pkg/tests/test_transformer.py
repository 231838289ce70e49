import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkcodes.analysis import binary_entropy
from dkcodes.bitstream import BitBuffer, random_bits
from dkcodes.errors import DecodeDivergenceError, TransformerUnderflowError
from dkcodes.transformer import (
    PROB_ONE,
    STATE_BITS,
    QuantizedBias,
    bias_inverse,
    bias_transform,
    biased_source,
)


def test_quantization_is_within_half_step():
    for p in (0.1, 0.3333, 0.6823, 0.99):
        q = QuantizedBias.from_float(p)
        assert abs(q.value - p) <= 2**-17
        assert q.denominator == PROB_ONE


def test_quantization_clips_away_from_degenerate():
    assert QuantizedBias.from_float(1e-9).numerator == 1
    assert QuantizedBias.from_float(1 - 1e-9).numerator == PROB_ONE - 1


def test_half_bias_is_identity_on_prefix():
    u = random_bits(5000, 11)
    res = bias_transform(u, 0.5)
    assert res.bits == u[: len(res.bits)]


def test_statistics_of_biased_output():
    u = random_bits(400_000, 5)
    res = bias_transform(u, 0.7)
    zeros = res.bits.count_zeros() / len(res)
    assert zeros == pytest.approx(0.7, abs=0.005)
    # consumption per symbol is h(p)
    assert res.consumed / len(res) == pytest.approx(binary_entropy(0.7), rel=0.01)


def test_output_is_not_markov():
    res = bias_transform(random_bits(300_000, 9), 0.8)
    b = res.bits.bits.astype(int)
    after_zero = np.mean(b[1:][b[:-1] == 0] == 0)
    after_one = np.mean(b[1:][b[:-1] == 1] == 0)
    assert abs(after_zero - after_one) < 0.01


def test_fixed_length_and_underflow():
    u = random_bits(200, 1)
    with pytest.raises(TransformerUnderflowError):
        bias_transform(u, 0.9, 10_000)
    res = bias_transform(u, 0.9, 10_000, pad=True)
    assert len(res) == 10_000


def test_tail_carries_the_register():
    res = bias_transform(random_bits(1000, 3), 0.3)
    assert len(res.tail) >= STATE_BITS
    assert res.consumed >= len(res.tail)


def test_empty_input():
    res = bias_transform(BitBuffer(), 0.4)
    assert len(res) == 0 and res.consumed == 0
    assert len(bias_inverse(res, 0.4)) == 0


@given(st.lists(st.integers(0, 1), min_size=1, max_size=400), st.integers(1, PROB_ONE - 1))
def test_roundtrip_any_bias(bits, num):
    q = QuantizedBias(num)
    res = bias_transform(bits, q)
    back = bias_inverse(res, q)
    assert res.consumed <= len(bits)
    assert back == BitBuffer(bits)[: res.consumed]


@given(st.lists(st.integers(0, 1), max_size=300), st.floats(0.02, 0.98), st.integers(0, 600))
def test_roundtrip_fixed_length_padded(bits, p, n_out):
    res = bias_transform(bits, p, n_out, pad=True)
    back = bias_inverse(res, p)
    assert len(back) == res.consumed
    k = min(len(bits), len(back))
    assert back[:k] == BitBuffer(bits)[:k]
    assert not back.bits[len(bits) :].any()


def test_tampered_stream_detected():
    u = random_bits(3000, 4)
    res = bias_transform(u, 0.75)
    flipped = res.bits.bits.copy()
    flipped[100] ^= 1
    with pytest.raises(DecodeDivergenceError):
        bias_inverse(flipped, 0.75, res.consumed, res.tail)


def test_wrong_consumed_count_detected():
    res = bias_transform(random_bits(3000, 4), 0.75)
    with pytest.raises(DecodeDivergenceError):
        bias_inverse(res.bits, 0.75, res.consumed + 1, res.tail)


def test_biased_source_frequency():
    b = biased_source(1, 0.2, 100_000)
    assert b.count_zeros() / len(b) == pytest.approx(0.2, abs=0.005)
