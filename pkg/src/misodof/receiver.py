"""
Receive-side processing for the hybrid scheme.

After phase 1 each receiver holds its own sample. Once the quantized
interference pair has been multicast, user 1 forms
``(y1 - eta_hat1, eta_hat2) = S1 W u_tilde + noise`` and user 2 forms
``(eta_hat1, z1 - eta_hat2) = S1 Q v_tilde + noise``: an equivalent 2x2 MIMO
channel per user.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractError, DomainError
from .linalg import logdet_capacity

__all__ = [
    "UNIFORM_NOISE_POWER",
    "EquivMimo",
    "ErrorEventTally",
    "TrialRecord",
    "multicast_slots",
    "slots_for_bits",
    "multicast_capacity",
    "simulate_multicast",
    "max_multicast_rate",
    "assemble_equiv_mimo",
    "effective_rate",
    "min_distance_decode",
    "classify_errors",
    "range_error_bound",
    "outage_probability",
    "residual_exceedance",
]

#: Second moment of a complex error uniform on the unit cell (1/12 per dimension).
UNIFORM_NOISE_POWER = 1.0 / 6.0


def multicast_slots(p, alpha_p, zeta, delta):
    """Slots needed to multicast the quantized pair at rate ``(1-delta) log2 p`` per slot.

    ``kappa = 4 / ((1-delta) log2 p) + 2 (1 + zeta - alpha_p) / (1-delta)``,
    floored at zero.
    """
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if zeta <= 0:
        raise DomainError("zeta must be positive")
    lp = math.log2(p)
    kappa = 4.0 / ((1.0 - delta) * lp) + 2.0 * (1.0 + zeta - alpha_p) / (1.0 - delta)
    return max(kappa, 0.0)


def slots_for_bits(bits, p, delta):
    """Slots spent on ``bits`` at the multicast rate ``(1-delta) log2 p``."""
    return bits / ((1.0 - delta) * math.log2(p))


def multicast_capacity(states, p):
    """Per-slot worst-user capacity using transmit antenna 1 only.

    ``states`` has shape ``(..., S, 2, m)``; returns ``(..., S)``.
    """
    states = np.asarray(states)
    gain = np.minimum(np.abs(states[..., 0, 0]) ** 2, np.abs(states[..., 1, 0]) ** 2)
    return np.log2(1.0 + p * gain)


def simulate_multicast(bits, kappa, states, p):
    """Whether ``bits`` fit into ``kappa`` multicast slots.

    Success iff ``bits <= sum_t C_t`` over the first ``floor(kappa)`` slots
    plus the fractional part of the next, where ``C_t`` is the slot's
    worst-user capacity. The rate back-off ``delta`` is already carried by
    ``kappa``.
    """
    if kappa < 0:
        raise ContractError("kappa must be nonnegative")
    cap = multicast_capacity(states, p)
    n_slots = math.ceil(kappa)
    if cap.shape[-1] < n_slots:
        raise ContractError(f"need {n_slots} multicast slot states, got {cap.shape[-1]}")
    weights = np.ones(n_slots)
    if n_slots:
        weights[-1] = kappa - (n_slots - 1)
    total = cap[..., :n_slots] @ weights if n_slots else np.zeros(cap.shape[:-1])
    return np.asarray(bits) <= total


def max_multicast_rate(p, m, rng, trials=100_000, outage=0.01):
    """Largest per-slot bit load decodable by both users with probability ``1 - outage``.

    This is the ``outage``-quantile of the worst-user single-antenna capacity.
    """
    from .channel import sample_iid_states

    states = sample_iid_states(trials, m, rng)[:, None]
    return float(np.quantile(multicast_capacity(states, p)[:, 0], outage))


@dataclass(frozen=True)
class EquivMimo:
    """Equivalent MIMO channel ``obs = f @ u + n`` with ``E|n_i|^2 = noise[i]``.

    ``extra`` is the power of the residual term caused by imperfect receiver
    estimates (Doppler model); it is already included in ``noise``.
    """

    f: np.ndarray
    obs: np.ndarray
    noise: np.ndarray
    extra: float = 0.0


def assemble_equiv_mimo(frame, state, y, q, user, xi_power=(UNIFORM_NOISE_POWER, UNIFORM_NOISE_POWER),
                        extra_power=0.0):
    """Build the equivalent MIMO channel of ``user`` (1 or 2).

    Parameters
    ----------
    frame : HybridFrame
    state : ChannelState
        State of the phase-1 slot as known to the receivers.
    y : complex or ndarray
        The user's own phase-1 sample (``y1`` for user 1, ``z1`` for user 2).
    q : QuantizedInterference, tuple ``(eta_hat1, eta_hat2)``, or None
        Recovered quantized pair; ``None`` means the multicast failed.
    xi_power : pair of float
        Second moments of the quantization noise of ``eta1`` and ``eta2``.
    extra_power : float
        Power of any additional residual term on the user's own sample.
    """
    if q is None:
        raise ContractError("multicast was not recovered")
    if hasattr(q, "eta_hat1"):
        e1, e2 = q.eta_hat1, q.eta_hat2
    else:
        e1, e2 = q
    s = state.s
    x1, x2 = xi_power
    if user == 1:
        f = s @ frame.precoders.w
        obs = np.stack(np.broadcast_arrays(np.asarray(y) - e1, e2), axis=-1)
        noise = np.array([1.0 + x1 + extra_power, x2])
    elif user == 2:
        f = s @ frame.precoders.q
        obs = np.stack(np.broadcast_arrays(e1, np.asarray(y) - e2), axis=-1)
        noise = np.array([x1, 1.0 + x2 + extra_power])
    else:
        raise ContractError("user must be 1 or 2")
    return EquivMimo(f=f, obs=obs, noise=noise, extra=float(extra_power))


def effective_rate(frame, equiv, kappa):
    """Log-det rate of the equivalent channel spread over ``1 + kappa`` slots."""
    lam = np.array([frame.alloc.p1, frame.alloc.p2])
    return logdet_capacity(equiv.f, lam, equiv.noise) / (1.0 + kappa)


def min_distance_decode(equiv, codebook):
    """Index of the codeword ``c`` minimising ``||obs - f c||`` (lowest index on ties)."""
    entries = getattr(codebook, "entries", codebook)
    entries = np.asarray(entries)
    if entries.shape[-2] == 0:
        raise ContractError("empty codebook")
    images = entries @ np.swapaxes(equiv.f, -1, -2)  # (..., K, k)
    d = np.sum(np.abs(equiv.obs[..., None, :] - images) ** 2, axis=-1)
    return np.argmin(d, axis=-1)


class TrialRecord(NamedTuple):
    """Per-trial outcomes; arrays share the batch shape, ``decoded``/``sent`` add a user axis."""

    in_range: np.ndarray
    multicast_ok: np.ndarray
    decoded: np.ndarray
    sent: np.ndarray


@dataclass
class ErrorEventTally:
    """Counts of range, multicast and MIMO-decoding error events.

    Tallies merge with ``+``; the merge is associative and commutative.
    """

    e_delta: int = 0
    e_mc: int = 0
    e_mimo: int = 0
    any_error: int = 0
    trials: int = 0

    def __add__(self, other):
        return ErrorEventTally(self.e_delta + other.e_delta, self.e_mc + other.e_mc,
                               self.e_mimo + other.e_mimo, self.any_error + other.any_error,
                               self.trials + other.trials)

    def frequencies(self):
        n = max(self.trials, 1)
        return {"e_delta": self.e_delta / n, "e_mc": self.e_mc / n, "e_mimo": self.e_mimo / n}


def classify_errors(record):
    """Tally the three error events of a batch of trials."""
    in_range = np.atleast_1d(record.in_range)
    mc_ok = np.atleast_1d(record.multicast_ok)
    decoded = np.asarray(record.decoded)
    sent = np.asarray(record.sent)
    wrong = np.atleast_1d(np.any(decoded != sent, axis=-1))
    e_delta = ~in_range
    e_mc = ~mc_ok
    return ErrorEventTally(int(e_delta.sum()), int(e_mc.sum()), int(wrong.sum()),
                           int((e_delta | e_mc | wrong).sum()), int(in_range.size))


def range_error_bound(p, alpha_p, beta_p, zeta, eps, m=2):
    """Union bound on the quantization range error over the four real parts.

    ``4 (exp(-p**eps) + p**(-2(zeta-eps)) / (4 m^2)
    + p**(-2(zeta-eps+1-alpha_p-beta_p)) / (4 m^2))``.
    """
    if not zeta > eps > 0:
        raise DomainError("need zeta > eps > 0")
    c = 1.0 / (4.0 * m * m)
    one = (math.exp(-p ** eps) + c * p ** (-2.0 * (zeta - eps))
           + c * p ** (-2.0 * (zeta - eps + 1.0 - alpha_p - beta_p)))
    return 4.0 * one


def outage_probability(f, r, eps1, alloc):
    """Fraction of channels with ``log2 det(I + F Lam F^H) < (r + eps1) log2 p``.

    ``f`` is a batch of equivalent channel matrices, shape ``(n, 2, 2)`` with
    ``n >= 1000``.
    """
    f = np.asarray(f)
    if f.ndim != 3 or f.shape[0] < 1000:
        raise ContractError("need at least 1000 channel samples")
    ld = logdet_capacity(f, alloc.lam, np.ones(2))
    return float(np.mean(ld < (r + eps1) * math.log2(alloc.p)))


def residual_exceedance(residual, p, eps):
    """Empirical ``P[|residual|^2 > p**eps]``."""
    return float(np.mean(np.abs(np.asarray(residual)) ** 2 > p ** eps))
