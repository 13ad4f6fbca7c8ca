import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from misodof.errors import CodecFormatError, ContractError, DomainError
from misodof.quantizer import (QuantizedInterference, QuantizerSpec, bit_budget, decode_indices,
                               encode_indices, field_width, quantize, quantize_pair,
                               truncation_level)


def test_quantize_examples():
    spec = QuantizerSpec(10)
    eh, xi, ok = quantize(0.7 - 1.2j, spec)
    assert eh == 0.5 - 1.5j and ok
    assert xi == pytest.approx(0.2 + 0.3j)
    eh, _, ok = quantize(0j, spec)
    assert eh == 0.5 + 0.5j and ok


def test_out_of_range_truncates_to_zero_cell():
    eh, _, ok = quantize(12.0 + 1.2j, QuantizerSpec(10))
    assert not ok and eh == 0.5 + 1.5j


def test_uniform_noise_moments(rng):
    spec = QuantizerSpec(50)
    eta = rng.uniform(-50, 50, 10 ** 6) + 1j * rng.uniform(-50, 50, 10 ** 6)
    _, xi, ok = quantize(eta, spec)
    assert ok.all()
    assert max(np.max(np.abs(xi.real)), np.max(np.abs(xi.imag))) <= 0.5
    assert np.mean(np.abs(xi) ** 2) == pytest.approx(1 / 6, rel=0.01)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.5, 100), st.floats(-1, 1), st.floats(-1, 1))
def test_in_range_error_at_most_half(eta_bar, a, b):
    spec = QuantizerSpec(eta_bar)
    eta = complex(a * eta_bar, b * eta_bar)
    _, xi, ok = quantize(eta, spec)
    assert ok
    assert abs(xi.real) <= 0.5 and abs(xi.imag) <= 0.5


def test_integer_eta_bar_top_edge_folds():
    eh, xi, ok = quantize(8.0 + 0j, QuantizerSpec(8))
    assert ok and eh.real == 7.5 and xi.real == 0.5


def test_bit_budget_examples():
    assert bit_budget(QuantizerSpec(8)) == 16
    assert bit_budget(QuantizerSpec(0.5)) == 4
    p, zeta, alpha = 1e4, 0.1, 0.5
    eb = truncation_level(p, zeta, math.sqrt(p ** -alpha))
    assert abs(bit_budget(QuantizerSpec(eb)) - (4 + 2 * (1 + zeta - alpha) * math.log2(p))) <= 4
    with pytest.raises(DomainError):
        bit_budget(QuantizerSpec(0.3))
    with pytest.raises(DomainError):
        QuantizerSpec(0)


def test_endpoint_indices():
    spec = QuantizerSpec(8)
    q = quantize_pair(-7.9 - 7.9j, 7.9 + 7.9j, spec)
    assert q.indices == (0, 0, 15, 15)
    assert encode_indices(q, spec) == "0000" * 2 + "1111" * 2


def test_round_trip(rng):
    for eb in (0.5, 3.2, 8, 100.7):
        spec = QuantizerSpec(eb)
        k = spec.half_levels
        for _ in range(500):
            idx = rng.integers(0, spec.levels, 4)
            v = idx - k + 0.5
            q = QuantizedInterference(complex(v[0], v[1]), complex(v[2], v[3]), tuple(idx), bit_budget(spec))
            out = decode_indices(encode_indices(q, spec), spec)
            assert out.eta_hat1 == q.eta_hat1 and out.eta_hat2 == q.eta_hat2
            assert out.indices == tuple(int(i) for i in idx)


def test_codec_errors():
    spec = QuantizerSpec(8)
    with pytest.raises(CodecFormatError):
        decode_indices("0101", spec)
    with pytest.raises(CodecFormatError):
        decode_indices("2" * 16, spec)
    with pytest.raises(ContractError):
        encode_indices(QuantizedInterference(0.3, 0.5, (), 0), spec)
    spec3 = QuantizerSpec(2.5)  # 6 levels in 3-bit fields
    assert field_width(spec3) == 3
    with pytest.raises(CodecFormatError):
        decode_indices("111" * 4, spec3)
