"""
Transmit-side schemes for the two-user MISO broadcast channel.

* ``zf_baseline`` -- one stream per user, zero-forced against the other
  user's estimated channel;
* ``mat_original`` / ``mat_variant`` -- three-slot retrospective alignment
  using delayed CSIT only;
* ``hybrid_phase1`` -- the precoded, power-allocated mixed broadcast whose
  overheard interference is quantized and multicast afterwards.

All functions broadcast over leading batch axes.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import crandn
from .errors import ContractError, DomainError
from .linalg import PrecoderPair, build_precoders, hermitian, null_direction

__all__ = [
    "PowerAllocation",
    "Codebook",
    "HybridFrame",
    "MatMatrices",
    "ZfSample",
    "allocate_power",
    "draw_codebook",
    "draw_codebooks",
    "transmit_estimates",
    "hybrid_phase1",
    "interference_power",
    "mat_matrices",
    "mat_original",
    "mat_variant",
    "mat_rate",
    "zf_baseline",
]

MAX_CODEBOOK_SIZE = 2 ** 16


@dataclass(frozen=True)
class PowerAllocation:
    """Symmetric per-stream powers: both users put ``p1`` on the stream
    orthogonal to the other user's estimated channel and ``p2`` on the
    stream along it, so ``2 (p1 + p2) = p``."""

    p: float
    p1: float
    p2: float

    @property
    def beta_p(self):
        """Power exponent ``log p2 / log p`` of the second stream."""
        return math.log(self.p2) / math.log(self.p)

    @property
    def lam(self):
        return np.array([self.p1, self.p2])


def allocate_power(p, alpha_p):
    """Second-stream power ``min(p**(1-alpha), p/4)`` (``1`` when ``alpha > 1``).

    Raises
    ------
    DomainError
        If ``p <= 2``.
    """
    if p <= 2:
        raise DomainError("allocation needs p > 2")
    if alpha_p < 0:
        raise DomainError("alpha_p must be nonnegative")
    if alpha_p <= 1:
        p2 = min(p ** (1.0 - alpha_p), p / 4.0)
    else:
        p2 = 1.0
    return PowerAllocation(p=float(p), p1=p / 2.0 - p2, p2=float(p2))


@dataclass(frozen=True)
class Codebook:
    """Gaussian codebook of 2-dimensional codewords, shape ``(..., K, 2)``."""

    entries: np.ndarray
    rate_bits: float
    power_shape: np.ndarray

    @property
    def size(self):
        return self.entries.shape[-2]


def draw_codebook(rate_bits, lam, rng):
    """One codebook with ``min(2**rate_bits, 2**16)`` codewords of covariance ``diag(lam)``."""
    size = int(min(round(2 ** rate_bits), MAX_CODEBOOK_SIZE))
    lam = np.asarray(lam, dtype=float)
    return Codebook(crandn(rng, (size, 2)) * np.sqrt(lam), float(rate_bits), lam)


def draw_codebooks(n, size, lam, rng):
    """Independent codebooks for a batch of ``n`` frames, shape ``(n, size, 2)``."""
    return crandn(rng, (n, size, 2)) * np.sqrt(np.asarray(lam, dtype=float))


def _isotropic_where_zero(est, rng):
    zero = np.linalg.norm(est, axis=-1) == 0
    if not np.any(zero):
        return est
    if rng is None:
        return est  # let build_precoders raise
    est = np.array(est, copy=True)
    est[zero] = crandn(rng, est[zero].shape)
    return est


def transmit_estimates(csit, rng=None):
    """Estimates used for precoding.

    A zero estimate (no current CSIT) carries no direction; it is replaced by
    an isotropic draw independent of the channel, which has the same law as
    any fixed direction under i.i.d. fading.
    """
    return _isotropic_where_zero(csit.g_hat, rng), _isotropic_where_zero(csit.h_hat, rng)


@dataclass(frozen=True)
class HybridFrame:
    """Phase-1 state of one protocol round (or a batch of rounds)."""

    precoders: PrecoderPair
    alloc: PowerAllocation
    u_tilde: np.ndarray
    v_tilde: np.ndarray
    x1: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    zeta: float = 0.2
    delta: float = 0.05
    eps1: float = 0.1
    eps2: float = 0.1


def _bilinear(a, b):
    """``a.T @ b`` over the last axis."""
    return np.sum(a * b, axis=-1)


def hybrid_phase1(csit, alloc, u_tilde, v_tilde, rng=None, *, zeta=0.2, delta=0.05,
                  eps1=0.1, eps2=0.1, precoders=None):
    """Precode, superpose and broadcast; record the overheard interference.

    ``x1 = W u_tilde + Q v_tilde``. The interference values are evaluated
    against the true channel: ``eta1 = h^T Q v_tilde`` (seen by user 1) and
    ``eta2 = g^T W u_tilde`` (seen by user 2).
    """
    u_tilde = np.asarray(u_tilde, dtype=complex)
    v_tilde = np.asarray(v_tilde, dtype=complex)
    if u_tilde.shape[-1] != 2 or v_tilde.shape[-1] != 2:
        raise ContractError("phase-1 symbols must be 2-dimensional")
    if precoders is None:
        g_est, h_est = transmit_estimates(csit, rng)
        precoders = build_precoders(g_est, h_est)
    w, q = precoders.w, precoders.q
    if w.shape[-2] != csit.state.m:
        raise ContractError("precoder and channel dimensions differ")
    u = (w @ u_tilde[..., None])[..., 0]
    v = (q @ v_tilde[..., None])[..., 0]
    eta1 = _bilinear(csit.state.h, v)
    eta2 = _bilinear(csit.state.g, u)
    return HybridFrame(precoders, alloc, u_tilde, v_tilde, u + v, eta1, eta2,
                       zeta, delta, eps1, eps2)


def interference_power(csit, alloc, precoders):
    """Conditional powers of ``eta1`` and ``eta2`` given the channel states.

    ``sig1 = |delta^T q1|^2 p1 + |h^T q2|^2 p2`` and
    ``sig2 = |eps^T w1|^2 p1 + |g^T w2|^2 p2``.
    """
    w, q = precoders.w, precoders.q
    sig1 = (np.abs(_bilinear(csit.delta, q[..., 0])) ** 2 * alloc.p1
            + np.abs(_bilinear(csit.state.h, q[..., 1])) ** 2 * alloc.p2)
    sig2 = (np.abs(_bilinear(csit.eps, w[..., 0])) ** 2 * alloc.p1
            + np.abs(_bilinear(csit.state.g, w[..., 1])) ** 2 * alloc.p2)
    return sig1, sig2


# ---------------------------------------------------------------------------
# MAT
# ---------------------------------------------------------------------------

class MatMatrices(NamedTuple):
    """Stacked three-slot observation model.

    ``y = a1 @ u + b1 @ v + e`` at user 1 and ``z = a2 @ v + b2 @ u + b`` at
    user 2; every matrix is ``(..., 3, m)``. ``scale`` holds the amplitude
    factors applied in slots 2 and 3 to respect the per-slot power limit.
    """

    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    scale: np.ndarray


def _slot_scale(p, cond_power):
    return np.sqrt(np.minimum(1.0, p / np.maximum(cond_power, np.finfo(float).tiny)))


def mat_matrices(states, form, p, lam=None):
    """Observation matrices of the original (``form='original'``) or variant MAT.

    Parameters
    ----------
    states : ndarray, shape (..., 3, 2, m)
        True states of the three slots.
    p : float
        Per-slot power limit.
    lam : float, optional
        Per-antenna power of ``u`` and of ``v``; defaults to the largest value
        meeting the slot-1 budget (``p/m`` original, ``p/(2m)`` variant).
    """
    states = np.asarray(states, dtype=complex)
    if states.shape[-3:-2] != (3,) or states.shape[-2] != 2:
        raise ContractError("need three state matrices of shape (2, m)")
    m = states.shape[-1]
    h = states[..., :, 0, :]
    g = states[..., :, 1, :]
    h1, h2, h3 = h[..., 0, :], h[..., 1, :], h[..., 2, :]
    g1, g2, g3 = g[..., 0, :], g[..., 1, :], g[..., 2, :]
    zero = np.zeros_like(h1)
    nrm = lambda x: np.sum(np.abs(x) ** 2, axis=-1)
    if form == "original":
        lam = p / m if lam is None else lam
        c2 = np.ones(h1.shape[:-1])
        c3 = _slot_scale(p, lam * (nrm(g1) + nrm(h2)))
        k1 = (c3 * h3[..., 0])[..., None]
        k2 = (c3 * g3[..., 0])[..., None]
        a1 = np.stack([h1, zero, k1 * g1], axis=-2)
        b1 = np.stack([zero, h2, k1 * h2], axis=-2)
        a2 = np.stack([zero, g2, k2 * h2], axis=-2)
        b2 = np.stack([g1, zero, k2 * g1], axis=-2)
    elif form == "variant":
        lam = p / (2 * m) if lam is None else lam
        c2 = _slot_scale(p, lam * nrm(h1))
        c3 = _slot_scale(p, lam * nrm(g1))
        j1 = (c2 * h2[..., 0])[..., None]
        j2 = (c2 * g2[..., 0])[..., None]
        k1 = (c3 * h3[..., 0])[..., None]
        k2 = (c3 * g3[..., 0])[..., None]
        a1 = np.stack([h1, zero, k1 * g1], axis=-2)
        b1 = np.stack([h1, j1 * h1, zero], axis=-2)
        a2 = np.stack([g1, j2 * h1, zero], axis=-2)
        b2 = np.stack([g1, zero, k2 * g1], axis=-2)
    else:
        raise ContractError(f"unknown MAT form {form!r}")
    return MatMatrices(a1, b1, a2, b2, np.stack([c2, c3], axis=-1))


def _mat_observe(states, u, v, p, form, rng, noise):
    mats = mat_matrices(states, form, p)
    u = np.asarray(u, dtype=complex)[..., None]
    v = np.asarray(v, dtype=complex)[..., None]
    y = (mats.a1 @ u + mats.b1 @ v)[..., 0]
    z = (mats.a2 @ v + mats.b2 @ u)[..., 0]
    if noise:
        if rng is None:
            raise ContractError("noise requested without a generator")
        y = y + crandn(rng, y.shape)
        z = z + crandn(rng, z.shape)
    return y, z, mats


def mat_original(states, u, v, p, rng=None, noise=True):
    """Three-slot MAT: ``x1 = u``, ``x2 = v``, ``x3 = [g1^T u + h2^T v, 0]``.

    Returns ``(y, z, mats)`` where ``y``/``z`` stack the three received
    samples of user 1/user 2 and ``mats`` is the :class:`MatMatrices` model.
    """
    return _mat_observe(states, u, v, p, "original", rng, noise)


def mat_variant(states, u, v, p, rng=None, noise=True):
    """Variant: ``x1 = u + v``, ``x2 = [h1^T v, 0]``, ``x3 = [g1^T u, 0]``."""
    return _mat_observe(states, u, v, p, "variant", rng, noise)


def mat_rate(mats, lam):
    """Per-user rates (bits/channel use) with Gaussian inputs of per-antenna power ``lam``.

    Interference is treated as coloured noise in the 3-dimensional stacked
    observation: ``(log det(I + lam A A^H + lam B B^H) - log det(I + lam B B^H)) / 3``.
    """
    eye = np.eye(3)

    def one(a, b):
        n = eye + lam * b @ hermitian(b)
        _, full = np.linalg.slogdet(n + lam * a @ hermitian(a))
        _, base = np.linalg.slogdet(n)
        return (full - base) / np.log(2) / 3.0

    return one(mats.a1, mats.b1), one(mats.a2, mats.b2)


# ---------------------------------------------------------------------------
# ZF
# ---------------------------------------------------------------------------

class ZfSample(NamedTuple):
    sinr1: np.ndarray
    sinr2: np.ndarray
    rate1: np.ndarray
    rate2: np.ndarray


def zf_baseline(csit, p, rng=None):
    """Zero-forcing with imperfect current CSIT, one stream of power ``p/2`` per user.

    User 1's beam is orthogonal to the estimate of ``g`` and vice versa; the
    residual leakage caused by the estimation error is treated as noise.
    """
    if p <= 1:
        raise DomainError("power must exceed 1")
    g_est, h_est = transmit_estimates(csit, rng)
    w1 = null_direction(g_est)
    w2 = null_direction(h_est)
    h, g = csit.state.h, csit.state.g
    half = p / 2.0
    sinr1 = np.abs(_bilinear(h, w1)) ** 2 * half / (1.0 + np.abs(_bilinear(h, w2)) ** 2 * half)
    sinr2 = np.abs(_bilinear(g, w2)) ** 2 * half / (1.0 + np.abs(_bilinear(g, w1)) ** 2 * half)
    return ZfSample(sinr1, sinr2, np.log2(1.0 + sinr1), np.log2(1.0 + sinr2))
