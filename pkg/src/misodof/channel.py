"""
Fading processes and the knowledge model of transmitter and receivers.

Two channel families are provided:

* i.i.d. Rayleigh states with a noisy current estimate whose error variance
  decays as ``P**-alpha`` (:func:`make_csit`);
* a band-limited Doppler process (flat spectrum on ``[-F, F]`` cycles/slot)
  with pilot-based Wiener estimation and one-step prediction
  (:func:`doppler_train_and_predict`, :class:`DopplerWindowSampler`).

Arrays of states have shape ``(..., 2, m)``: row 0 is ``h`` (user 1), row 1 is
``g`` (user 2).
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import linalg, signal

from .errors import DimensionError, DomainError

__all__ = [
    "ChannelState",
    "CsitView",
    "DopplerConfig",
    "TrainingResult",
    "DopplerWindowSampler",
    "crandn",
    "sample_iid_state",
    "sample_iid_states",
    "make_csit",
    "doppler_alpha",
    "doppler_filter",
    "doppler_autocorrelation",
    "doppler_sequence",
    "sample_doppler_process",
    "wiener_weights",
    "doppler_train_and_predict",
]

DIAGONAL_LOADING = 1e-9


def crandn(rng, shape, var=1.0):
    """Circularly-symmetric complex Gaussian samples with variance ``var``."""
    shape = (int(shape),) if np.isscalar(shape) else tuple(shape)
    z = rng.standard_normal(shape + (2,))
    return np.sqrt(var / 2.0) * (z[..., 0] + 1j * z[..., 1])


@dataclass(frozen=True)
class ChannelState:
    """State matrix ``[h^T; g^T]`` of one slot (or a batch of slots).

    Attributes
    ----------
    s : ndarray, shape (..., 2, m)
    t : int
        Slot index, 1-based.
    """

    s: np.ndarray
    t: int = 1

    def __post_init__(self):
        if self.s.ndim < 2 or self.s.shape[-2] != 2 or self.s.shape[-1] < 2:
            raise DimensionError(f"state matrix must be (..., 2, m>=2), got {self.s.shape}")

    @property
    def h(self):
        return self.s[..., 0, :]

    @property
    def g(self):
        return self.s[..., 1, :]

    @property
    def m(self):
        return self.s.shape[-1]


@dataclass(frozen=True)
class CsitView:
    """What the transmitter knows in the current slot.

    ``state`` is the true current state. It is not available to the
    transmitter, but receivers hold it (together with the estimates), so the
    receiver-side view of the same slot is this object as a whole.
    """

    state: ChannelState
    h_hat: np.ndarray
    g_hat: np.ndarray
    sigma2: float
    alpha_p: float
    past: tuple = field(default=())

    @property
    def delta(self):
        """Estimation error of user 1's channel, ``h - h_hat``."""
        return self.state.h - self.h_hat

    @property
    def eps(self):
        """Estimation error of user 2's channel, ``g - g_hat``."""
        return self.state.g - self.g_hat


def sample_iid_states(n, m, rng):
    """Batch of ``n`` independent states, shape ``(n, 2, m)``, unit covariance."""
    if m < 2:
        raise DimensionError("need m >= 2 transmit antennas")
    return crandn(rng, (n, 2, m))


def sample_iid_state(m, rng):
    """One i.i.d. Rayleigh state."""
    if m < 2:
        raise DimensionError("need m >= 2 transmit antennas")
    return ChannelState(crandn(rng, (2, m)))


def csit_error_variance(p, alpha_p):
    """``min(1, p**-alpha_p)``; ``alpha_p = 0`` is exactly the no-CSIT endpoint."""
    return min(1.0, float(p) ** (-float(alpha_p)))


def make_csit(state, alpha_p, p, rng, past=()):
    """Draw current-slot estimates for a given true state.

    The estimate is sampled from its conditional law given the channel,
    ``h_hat = (1 - s2) h + sqrt(s2 (1 - s2)) z``, which makes ``h_hat`` and
    ``h - h_hat`` independent with covariances ``(1 - s2) I`` and ``s2 I``
    while leaving the supplied state untouched.

    Raises
    ------
    DomainError
        If ``p <= 1`` or ``alpha_p < 0``.
    """
    if p <= 1:
        raise DomainError("power must exceed 1")
    if alpha_p < 0:
        raise DomainError("alpha_p must be nonnegative")
    s2 = csit_error_variance(p, alpha_p)
    z = crandn(rng, state.s.shape)
    s_hat = (1.0 - s2) * state.s + np.sqrt(s2 * (1.0 - s2)) * z
    return CsitView(state=state, h_hat=s_hat[..., 0, :], g_hat=s_hat[..., 1, :],
                    sigma2=s2, alpha_p=float(alpha_p), past=tuple(past))


# ---------------------------------------------------------------------------
# Doppler model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DopplerConfig:
    """Doppler fading and training parameters.

    The normalised Doppler frequency is ``v * fc * tf / c`` cycles per slot
    unless ``f`` is given, in which case it is used directly and the physical
    parameters are ignored.
    """

    v: float = 0.0
    fc: float = 2e9
    tf: float = 1e-3
    c: float = 3e8
    gamma: float = 1.0
    length: int = 4096
    f: Optional[float] = None
    window: int = 64
    taps: int = 1025
    kaiser_beta: float = 12.0

    def __post_init__(self):
        if self.gamma < 1:
            raise DomainError("training resource factor gamma must be >= 1")
        fd = self.doppler_f
        if not 0 <= fd < 0.5:
            raise DomainError(f"normalised Doppler F = {fd} outside [0, 1/2)")

    @property
    def doppler_f(self):
        if self.f is not None:
            return float(self.f)
        return self.v * self.fc * self.tf / self.c


def doppler_alpha(cfg):
    """Return ``(F, 1 - 2F)``."""
    f = cfg.doppler_f
    return f, 1.0 - 2.0 * f


def doppler_filter(cfg):
    """Unit-energy Kaiser-windowed sinc low-pass with cutoff ``F``; ``None`` if static."""
    f = cfg.doppler_f
    if f == 0:
        return None
    b = signal.firwin(cfg.taps, f, window=("kaiser", cfg.kaiser_beta), fs=1.0)
    return b / np.linalg.norm(b)


def doppler_autocorrelation(cfg, max_lag):
    """Exact normalised autocorrelation ``r[0..max_lag]`` of the generator."""
    b = doppler_filter(cfg)
    if b is None:
        return np.ones(max_lag + 1)
    full = np.correlate(b, b, mode="full")[len(b) - 1:]
    r = np.zeros(max_lag + 1)
    k = min(len(full), max_lag + 1)
    r[:k] = full[:k]
    return r


def doppler_sequence(cfg, m, rng, length=None):
    """Array of shape ``(length, 2, m)``: every entry an independent Doppler process."""
    if m < 2:
        raise DimensionError("need m >= 2 transmit antennas")
    length = cfg.length if length is None else length
    b = doppler_filter(cfg)
    if b is None:
        return np.broadcast_to(crandn(rng, (1, 2, m)), (length, 2, m)).copy()
    w = crandn(rng, (length + len(b) - 1, 2, m))
    return signal.fftconvolve(w, b[:, None, None], mode="valid", axes=0)


def sample_doppler_process(cfg, m, rng):
    """List of :class:`ChannelState`, slots ``1..cfg.length``."""
    seq = doppler_sequence(cfg, m, rng)
    return [ChannelState(seq[t], t=t + 1) for t in range(seq.shape[0])]


def wiener_weights(r, snr, window, lead):
    """LMMSE weights for estimating ``h[t + lead]`` from pilots ``s[t-window+1..t]``.

    Pilots are ``sqrt(snr) h + nu`` with unit-variance noise; weights are
    ordered oldest first. Returns ``(weights, mse)`` with ``mse`` the error
    variance per entry.
    """
    r = np.asarray(r, dtype=float)
    if len(r) < window + lead:
        raise DimensionError("autocorrelation too short for the requested window")
    cov = snr * linalg.toeplitz(r[:window]) + (1.0 + DIAGONAL_LOADING) * np.eye(window)
    lags = lead + np.arange(window - 1, -1, -1)
    cross = np.sqrt(snr) * r[lags]
    a = linalg.solve(cov, cross, assume_a="pos")
    mse = max(1.0 - float(cross @ a), 0.0)
    return a, mse


class TrainingResult(NamedTuple):
    """Output of :func:`doppler_train_and_predict`.

    ``estimates[k]`` estimates slot ``slots[k]`` and ``predictions[k]``
    predicts slot ``slots[k] + 1`` (the last prediction has no ground truth
    and is left out of ``prediction_errors``). Errors are squared norms per
    user, shape ``(K, 2)``.
    """

    slots: np.ndarray
    estimates: np.ndarray
    predictions: np.ndarray
    estimation_errors: np.ndarray
    prediction_errors: np.ndarray


def doppler_train_and_predict(cfg, p, states, rng):
    """Pilot training followed by Wiener filtering and one-step prediction.

    Parameters
    ----------
    cfg : DopplerConfig
    p : float
        Transmit power; pilots are ``sqrt(p * gamma) h + nu``.
    states : list of ChannelState or ndarray, shape (L, 2, m)
    rng : numpy.random.Generator
        Pilot noise source.
    """
    if p <= 1:
        raise DomainError("power must exceed 1")
    seq = np.stack([s.s for s in states]) if isinstance(states, (list, tuple)) else np.asarray(states)
    length, w = seq.shape[0], cfg.window
    if length < w + 1:
        raise DimensionError(f"need at least {w + 1} slots, got {length}")
    snr = p * cfg.gamma
    r = doppler_autocorrelation(cfg, w + 1)
    a_est, _ = wiener_weights(r, snr, w, lead=0)
    a_pred, _ = wiener_weights(r, snr, w, lead=1)
    pilots = np.sqrt(snr) * seq + crandn(rng, seq.shape)
    windows = sliding_window_view(pilots, w, axis=0)  # (L-w+1, 2, m, w)
    est = windows @ a_est
    pred = windows @ a_pred
    slots = np.arange(w - 1, length)
    est_err = np.sum(np.abs(seq[slots] - est) ** 2, axis=-1)
    pred_err = np.sum(np.abs(seq[slots[:-1] + 1] - pred[:-1]) ** 2, axis=-1)
    return TrainingResult(slots + 1, est, pred, est_err, pred_err)


class DopplerWindowSampler:
    """Draw the true, estimated and predicted state of one protocol slot.

    Each draw samples ``window + 1`` consecutive slots of the Doppler process
    exactly (Gaussian with the generator's Toeplitz covariance), generates
    pilots, and returns for the last slot: the true state, the receivers'
    Wiener estimate (pilots up to and including that slot) and the
    transmitter's one-step prediction (pilots up to the previous slot).
    """

    def __init__(self, cfg, p):
        if p <= 1:
            raise DomainError("power must exceed 1")
        self.cfg = cfg
        self.p = float(p)
        w = cfg.window
        r = doppler_autocorrelation(cfg, w + 1)
        evals, evecs = linalg.eigh(linalg.toeplitz(r[:w + 1]))
        self._sqrt_cov = evecs * np.sqrt(np.clip(evals, 0.0, None))
        snr = self.p * cfg.gamma
        self._snr = snr
        self._a_est, self.estimation_mse = wiener_weights(r, snr, w, lead=0)
        self._a_pred, self.prediction_mse = wiener_weights(r, snr, w, lead=1)

    def draw(self, n, m, rng):
        """Return ``(true, estimate, prediction)`` arrays, each ``(n, 2, m)``."""
        w = self.cfg.window
        z = crandn(rng, (n, 2, m, w + 1))
        seq = z @ self._sqrt_cov.T
        pilots = np.sqrt(self._snr) * seq + crandn(rng, seq.shape)
        true = seq[..., w]
        est = pilots[..., 1:] @ self._a_est
        pred = pilots[..., :w] @ self._a_pred
        return true, est, pred
