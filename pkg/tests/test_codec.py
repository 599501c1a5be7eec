import numpy as np
import pytest

from zkfl.crypto import FixedPointCodec, dequantize_vector, quantize_vector
from zkfl.errors import ConfigError, RangeError


@pytest.fixture
def codec(pg):
    return FixedPointCodec(pg.order, frac_bits=16)


def test_quantize_examples(codec, pg):
    assert quantize_vector([0.5], codec).values == [32768]
    assert quantize_vector([0.0], codec).values == [0]
    assert quantize_vector([-1.0], codec).values == [pg.order - 65536]


def test_dequantize_examples(codec, pg):
    assert dequantize_vector(codec.quantize([0.25]), codec).tolist() == [0.25]
    assert dequantize_vector([pg.order - 65536], codec, 1).tolist() == [-1.0]


def test_sum_of_four_halves(codec, pg):
    z = codec.quantize([0.5])[0]
    total = (4 * z) % pg.order
    # integer oracle: 4 * 32768 = 131072 = 2.0 * 2^16
    assert total == 131072
    assert dequantize_vector([total], codec, n_summed=4).tolist() == [2.0]


def test_negative_sums_decode(codec):
    vals = [-0.75, 1.5, -3.25]
    q = codec.order
    total = sum(codec.quantize([v])[0] for v in vals) % q
    assert codec.dequantize_vector([total], 3).tolist() == [sum(vals)]


def test_integer_roundtrip(codec):
    rng = np.random.default_rng(3)
    zs = rng.integers(codec.lo, codec.hi, size=2000, endpoint=True)
    reals = zs.astype(np.float64) / codec.scale
    back, _ = codec.to_int(reals)
    assert np.array_equal(back, zs)


def test_error_bound_random(codec):
    rng = np.random.default_rng(7)
    limit = 2.0 ** (codec.int_bits - 1) / codec.scale
    x = rng.uniform(-limit, limit * (1 - 1e-9), size=100_000)
    q = codec.quantize_vector(x)
    assert not q.clamped.any()
    err = np.abs(codec.dequantize_vector(q.values) - x)
    assert err.max() <= 2.0 ** -codec.frac_bits


def test_clamping_is_flagged(codec):
    out = codec.quantize_vector([1e9, -1e9, 0.1])
    assert out.clamped.tolist() == [True, True, False]
    assert codec.dequantize_vector(out.values).tolist()[:2] == [codec.hi / codec.scale, codec.lo / codec.scale]


def test_config_rejects_wrapping_parameters(tg, pg):
    with pytest.raises(ConfigError):
        FixedPointCodec(tg.order)
    with pytest.raises(ConfigError):
        FixedPointCodec(2**40, int_bits=32, n_max=256)
    FixedPointCodec(pg.order, n_max=10**6)


def test_range_error_outside_window(codec):
    too_big = 2 * 2**31 + 5
    with pytest.raises(RangeError):
        codec.dequantize_vector([too_big], n_summed=1)
    assert codec.dequantize_vector([too_big], n_summed=3)[0] == too_big / codec.scale
