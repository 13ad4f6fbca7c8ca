"""
Closed-form DoF curves and slope estimation from measured rates.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError, EstimationError

__all__ = ["DofEstimate", "theoretical_dof", "baseline_dof", "zf_dof", "mat_dof", "fit_dof",
           "MIN_FIT_POINTS", "MIN_FIT_SPAN_DB"]

MIN_FIT_POINTS = 3
MIN_FIT_SPAN_DB = 20.0


def theoretical_dof(alpha):
    """Per-user DoF of the hybrid scheme: ``(2-a)/(3-2a)`` on ``[0, 1]``, ``1`` beyond."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise DomainError("alpha must be nonnegative")
    if alpha > 1:
        return 1.0
    return (2.0 - alpha) / (3.0 - 2.0 * alpha)


def zf_dof(alpha):
    """Per-user DoF of zero-forcing with imperfect current CSIT."""
    return min(max(float(alpha), 0.0), 1.0)


def mat_dof(alpha=0.0):
    """Per-user DoF of MAT, independent of the current CSIT."""
    return 2.0 / 3.0


def baseline_dof(alpha):
    """Best of ZF and MAT: ``max(2/3, min(alpha, 1))``."""
    return max(mat_dof(), zf_dof(alpha))


@dataclass(frozen=True)
class DofEstimate:
    """Least-squares slope of rate vs ``log2 P``."""

    scheme: str
    slope: float
    stderr: float
    p_db_min: float
    p_db_max: float
    n_points: int
    alpha: float = math.nan


def fit_dof(samples, scheme=None, alpha=math.nan):
    """Fit the pre-log factor of a rate curve.

    Parameters
    ----------
    samples : sequence of RateSample, or of ``(p_db, rate)`` pairs
        One curve (a single scheme at a single alpha).
    scheme : str, optional
        Label; taken from the samples when they carry one.

    Raises
    ------
    EstimationError
        With fewer than 3 points or a span below 20 dB.
    """
    samples = list(samples)
    if samples and hasattr(samples[0], "p_db"):
        scheme = samples[0].scheme if scheme is None else scheme
        alpha = samples[0].alpha if math.isnan(alpha) else alpha
        pts = [(s.p_db, s.rate) for s in samples]
    else:
        pts = [(float(a), float(b)) for a, b in samples]
    if len(pts) < MIN_FIT_POINTS:
        raise EstimationError(f"need at least {MIN_FIT_POINTS} grid points, got {len(pts)}")
    p_db, rate = (np.array(v, dtype=float) for v in zip(*sorted(pts)))
    if p_db[-1] - p_db[0] < MIN_FIT_SPAN_DB:
        raise EstimationError(f"grid spans {p_db[-1] - p_db[0]:g} dB, need {MIN_FIT_SPAN_DB:g}")
    x = p_db / (10.0 * math.log10(2.0))
    if np.ptp(rate) == 0:
        slope, stderr = 0.0, 0.0
    else:
        fit = stats.linregress(x, rate)
        slope, stderr = float(fit.slope), float(fit.stderr)
    return DofEstimate(scheme or "", slope, stderr, float(p_db[0]), float(p_db[-1]), len(pts), float(alpha))


def fit_all(samples):
    """One :class:`DofEstimate` per ``(alpha, scheme)`` curve present in ``samples``."""
    curves = {}
    for s in samples:
        curves.setdefault((s.alpha, s.scheme), []).append(s)
    return [fit_dof(v) for v in curves.values()]
