"""
Small complex linear-algebra helpers for the two-user MISO broadcast channel.

Everything here operates on numpy arrays and broadcasts over leading axes,
so the same routine serves a single channel draw of shape ``(m,)`` and a
Monte-Carlo batch of shape ``(n, m)``.

Convention: receivers see ``h.T @ x`` (bilinear, no conjugate). A precoder
column ``w`` is "orthogonal to the channel ``g``" when ``g.T @ w == 0``,
which is the Hermitian orthogonality of ``w`` and ``conj(g)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateDirectionError, DimensionError, NumericError

__all__ = [
    "PrecoderPair",
    "hermitian",
    "unit_direction",
    "null_direction",
    "precoder_matrix",
    "build_precoders",
    "det_gram_identity",
    "logdet_capacity",
    "eig2",
]

CONSTRUCTION_TOL = 1e-12
IDENTITY_TOL = 1e-10


def hermitian(a):
    """Conjugate transpose of the two trailing axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def _check_vectors(v):
    v = np.asarray(v, dtype=complex)
    if v.ndim < 1 or v.shape[-1] < 2:
        raise DimensionError(f"need m >= 2 antennas, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NumericError("non-finite channel entries")
    return v


def unit_direction(c):
    """Return ``conj(c) / ||c||``, the direction matched to the channel ``c``.

    Raises
    ------
    DegenerateDirectionError
        If any vector in the batch is exactly zero.
    """
    c = _check_vectors(c)
    norm = np.linalg.norm(c, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DegenerateDirectionError("cannot take the direction of a zero vector")
    return np.conj(c) / norm


def null_direction(c):
    """Unit vector ``w`` with ``c.T @ w = 0``.

    Gram-Schmidt of the standard basis vector ``e_j`` against ``conj(c)``,
    where ``j`` is the coordinate with the smallest ``|c_j|`` (lowest index
    on ties). Deterministic for a given input.
    """
    d = unit_direction(c)
    j = np.argmin(np.abs(d), axis=-1)
    e = np.zeros_like(d)
    np.put_along_axis(e, j[..., None], 1.0, axis=-1)
    # e - d (d^H e)
    proj = np.take_along_axis(np.conj(d), j[..., None], axis=-1)
    w = e - d * proj
    w /= np.linalg.norm(w, axis=-1, keepdims=True)
    return w


def precoder_matrix(c):
    """``m x 2`` orthonormal precoder ``[null(c), conj(c)/||c||]``."""
    return np.stack([null_direction(c), unit_direction(c)], axis=-1)


@dataclass(frozen=True)
class PrecoderPair:
    """Orthonormal precoders for the two users.

    ``w`` (user 1) has its first column in the null space of the estimate of
    user 2's channel and its second column along it; ``q`` is the mirror
    image built from the estimate of user 1's channel. Both have shape
    ``(..., m, 2)``.
    """

    w: np.ndarray
    q: np.ndarray


def build_precoders(g_hat, h_hat):
    """Build the precoder pair from the current channel estimates.

    Parameters
    ----------
    g_hat, h_hat : array_like, shape (..., m)
        Transmitter estimates of user 2's and user 1's channels.

    Returns
    -------
    PrecoderPair
        ``w = [w1, w2]`` with ``g_hat.T w1 = 0`` and ``w2 = conj(g_hat)/||g_hat||``;
        ``q`` likewise from ``h_hat``.
    """
    g_hat = _check_vectors(g_hat)
    h_hat = _check_vectors(h_hat)
    if g_hat.shape[-1] != h_hat.shape[-1]:
        raise DimensionError("estimates must have the same number of antennas")
    return PrecoderPair(w=precoder_matrix(g_hat), q=precoder_matrix(h_hat))


def det_gram_identity(a):
    """Both sides of ``det(A^H A) = ||a2||^2 a1^H (I - n n^H) a1``, ``n = a2/||a2||``.

    Only used as a test oracle pair. ``a`` has shape ``(..., m, 2)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != 2 or a.shape[-2] < 2:
        raise DimensionError(f"expected an m x 2 matrix with m >= 2, got {a.shape}")
    a1, a2 = a[..., 0], a[..., 1]
    n2 = np.sum(np.abs(a2) ** 2, axis=-1)
    if np.any(n2 == 0):
        raise DegenerateDirectionError("second column is zero")
    lhs = np.real(np.linalg.det(hermitian(a) @ a))
    proj = np.sum(np.conj(a2) * a1, axis=-1)
    rhs = n2 * (np.sum(np.abs(a1) ** 2, axis=-1) - np.abs(proj) ** 2 / n2)
    return lhs, rhs


def logdet_capacity(f, lam, noise):
    """``log2 det(I + N^{-1/2} F diag(lam) F^H N^{-1/2})`` in bits per channel use.

    Parameters
    ----------
    f : array_like, shape (..., 2, 2)
    lam : array_like, shape (..., 2)
        Diagonal of the input covariance.
    noise : array_like, shape (..., 2)
        Diagonal of the noise covariance; strictly positive.
    """
    f = np.asarray(f, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(lam)) and np.all(np.isfinite(noise))):
        raise NumericError("non-finite input to logdet_capacity")
    if np.any(lam < 0) or np.any(noise <= 0):
        raise ContractError("need lam >= 0 and noise > 0")
    g = f * np.sqrt(lam)[..., None, :] / np.sqrt(noise)[..., :, None]
    k = g.shape[-1]
    # det(I + G G^H) = det(I + G^H G); slogdet keeps precision at high SNR
    _, ld = np.linalg.slogdet(np.eye(k) + hermitian(g) @ g)
    return np.maximum(ld / np.log(2), 0.0)


def eig2(h, tol=IDENTITY_TOL):
    """Closed-form eigenvalues ``mu1 >= mu2 >= 0`` of a 2x2 Hermitian PSD matrix."""
    h = np.asarray(h, dtype=complex)
    if h.shape[-2:] != (2, 2):
        raise DimensionError(f"expected 2x2, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - hermitian(h))) > tol * scale:
        raise ContractError("matrix is not Hermitian")
    a = np.real(h[..., 0, 0])
    d = np.real(h[..., 1, 1])
    b = h[..., 0, 1]
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)
    mu1 = half_tr + disc
    # mu1 * mu2 = det avoids cancellation in the small eigenvalue
    det = a * d - np.abs(b) ** 2
    mu2 = np.where(mu1 > 0, det / np.where(mu1 > 0, mu1, 1.0), half_tr - disc)
    if np.any(mu2 < -tol * scale):
        raise ContractError("matrix is not positive semidefinite")
    return np.maximum(mu1, 0.0), np.maximum(mu2, 0.0)
