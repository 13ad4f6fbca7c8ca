"""
Truncated unit-step midpoint quantizer for the overheard interference.

Each real dimension ``x`` is first truncated (``x`` if ``|x| <= eta_bar``,
else ``0``) and then mapped to the midpoint ``floor(x) + 1/2``. The grid has
``2 * ceil(eta_bar)`` levels ``-ceil(eta_bar) + 1/2, ..., ceil(eta_bar) - 1/2``;
the value ``x = ceil(eta_bar)`` (only reachable when ``eta_bar`` is an
integer) folds into the top cell, so in-range errors never exceed ``1/2``.

A quantized pair ``(eta_hat_1, eta_hat_2)`` is four grid indices, packed as
fixed-width big-endian unsigned fields in the order
``(Re eta1, Im eta1, Re eta2, Im eta2)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import CodecFormatError, ContractError, DomainError

__all__ = [
    "QuantizerSpec",
    "QuantizedInterference",
    "truncation_level",
    "quantize_real",
    "quantize",
    "quantize_pair",
    "bit_budget",
    "field_width",
    "encode_indices",
    "decode_indices",
]


@dataclass(frozen=True)
class QuantizerSpec:
    """Truncation level ``eta_bar`` of a unit-step quantizer."""

    eta_bar: float
    step: float = 1.0

    def __post_init__(self):
        if not self.eta_bar > 0:
            raise DomainError("eta_bar must be positive")
        if self.step != 1.0:
            raise DomainError("only the unit step is supported")

    @property
    def half_levels(self):
        """``ceil(eta_bar)``: number of grid points on each side of zero."""
        return math.ceil(self.eta_bar)

    @property
    def levels(self):
        return 2 * self.half_levels


def truncation_level(p, zeta, sigma):
    """``eta_bar = p**((1 + zeta) / 2) * sigma``."""
    return float(p) ** ((1.0 + zeta) / 2.0) * float(sigma)


@dataclass(frozen=True)
class QuantizedInterference:
    eta_hat1: complex
    eta_hat2: complex
    indices: tuple
    total_bits: float


def quantize_real(x, spec):
    """Quantize real values. Returns ``(midpoints, in_range)``; broadcasts."""
    x = np.asarray(x, dtype=float)
    in_range = np.abs(x) <= spec.eta_bar
    t = np.where(in_range, x, 0.0)
    top = spec.half_levels - 0.5
    return np.minimum(np.floor(t) + 0.5, top), in_range


def quantize(eta, spec):
    """Quantize complex interference values.

    Returns
    -------
    eta_hat : complex ndarray
    xi : complex ndarray
        Quantization noise ``eta - eta_hat``.
    in_range : bool ndarray
        True when both real and imaginary parts lie in ``[-eta_bar, eta_bar]``.
    """
    eta = np.asarray(eta, dtype=complex)
    re, ok_re = quantize_real(eta.real, spec)
    im, ok_im = quantize_real(eta.imag, spec)
    eta_hat = re + 1j * im
    return eta_hat, eta - eta_hat, ok_re & ok_im


def bit_budget(spec):
    """``4 * log2(2 * ceil(eta_bar))`` bits for the two complex values."""
    if spec.eta_bar < 0.5:
        raise DomainError("eta_bar below 1/2 leaves a degenerate range")
    return 4.0 * math.log2(spec.levels)


def field_width(spec):
    """Bits per packed index field."""
    return max(1, math.ceil(math.log2(spec.levels)))


def _grid_index(value, spec):
    k = value + spec.half_levels - 0.5
    idx = int(round(k))
    if abs(k - idx) > 1e-9 or not 0 <= idx < spec.levels:
        raise ContractError(f"{value!r} is not on the quantizer grid")
    return idx


def quantize_pair(eta1, eta2, spec):
    """Quantize one interference pair into a :class:`QuantizedInterference`."""
    (h1, h2), _, _ = quantize(np.array([eta1, eta2]), spec)
    indices = tuple(_grid_index(v, spec) for v in (h1.real, h1.imag, h2.real, h2.imag))
    return QuantizedInterference(complex(h1), complex(h2), indices, bit_budget(spec))


def encode_indices(q, spec):
    """Pack the four grid indices of ``q`` into a ``'0'/'1'`` string."""
    width = field_width(spec)
    values = (q.eta_hat1.real, q.eta_hat1.imag, q.eta_hat2.real, q.eta_hat2.imag)
    return "".join(format(_grid_index(v, spec), f"0{width}b") for v in values)


def decode_indices(bits, spec):
    """Inverse of :func:`encode_indices`."""
    width = field_width(spec)
    if len(bits) != 4 * width or set(bits) - {"0", "1"}:
        raise CodecFormatError(f"expected {4 * width} binary digits, got {len(bits)}")
    idx = tuple(int(bits[i * width:(i + 1) * width], 2) for i in range(4))
    if any(i >= spec.levels for i in idx):
        raise CodecFormatError("index beyond the quantizer grid")
    v = [i - spec.half_levels + 0.5 for i in idx]
    return QuantizedInterference(complex(v[0], v[1]), complex(v[2], v[3]), idx, bit_budget(spec))
