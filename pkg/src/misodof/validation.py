"""
Quick invariant suite behind ``misodof validate``.

Each check draws its own random inputs from a generator seeded by the
caller and returns ``(name, passed, detail)``.
"""
import numpy as np

from .channel import crandn, sample_iid_states
from .dof import baseline_dof, theoretical_dof
from .linalg import build_precoders, det_gram_identity
from .quantizer import QuantizerSpec, decode_indices, encode_indices, quantize, quantize_pair
from .receiver import range_error_bound
from .schemes import mat_matrices

__all__ = ["run_checks", "CHECKS"]


def check_theory(rng):
    a = np.linspace(0.0, 3.0, 301)
    d = np.array([theoretical_dof(x) for x in a])
    mono = bool(np.all(np.diff(d) >= -1e-15))
    dom = all(theoretical_dof(x) > baseline_dof(x) for x in a[(a > 0) & (a < 1)])
    ends = theoretical_dof(0) == 2 / 3 and theoretical_dof(1) == 1 and theoretical_dof(2) == 1
    return mono and dom and ends, "monotone, dominant on (0,1), endpoints exact"


def check_determinant(rng):
    worst = 0.0
    for m in (2, 3, 4):
        lhs, rhs = det_gram_identity(crandn(rng, (2000, m, 2)))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(lhs))))
    return worst < 1e-10, f"max relative error {worst:.2e}"


def check_precoders(rng):
    s = sample_iid_states(2000, 3, rng)
    pre = build_precoders(s[:, 1], s[:, 0])
    leak = max(float(np.max(np.abs(np.sum(s[:, 1] * pre.w[..., 0], -1)))),
               float(np.max(np.abs(np.sum(s[:, 0] * pre.q[..., 0], -1)))))
    gram = np.conj(np.swapaxes(pre.w, -1, -2)) @ pre.w
    unit = float(np.max(np.abs(gram - np.eye(2))))
    return leak < 1e-12 and unit < 1e-12, f"leakage {leak:.1e}, orthonormality {unit:.1e}"


def check_quantizer(rng):
    spec = QuantizerSpec(7.3)
    eta = crandn(rng, 100_000, var=40.0)
    _, xi, ok = quantize(eta, spec)
    err = max(float(np.max(np.abs(xi[ok].real))), float(np.max(np.abs(xi[ok].imag))))
    trips = all(decode_indices(encode_indices(q, spec), spec) == q
                for q in (quantize_pair(a, b, spec) for a, b in crandn(rng, (200, 2), var=40.0)))
    return err <= 0.5 and trips, f"max per-dimension error {err:.3f}, codec round-trip ok={trips}"


def check_mat_ranks(rng):
    ok = True
    for form in ("original", "variant"):
        mats = mat_matrices(sample_iid_states(600, 2, rng).reshape(200, 3, 2, 2), form, 1e3)
        for a, b in ((mats.a1, mats.b1), (mats.a2, mats.b2)):
            ra = np.linalg.matrix_rank(a, tol=1e-8)
            rb = np.linalg.matrix_rank(b, tol=1e-8)
            ok &= bool(np.all(ra == 2) and np.all(rb == 1))
    return ok, "signal rank 2, interference rank 1"


def check_range_bound(rng):
    p = 10.0 ** (np.arange(30, 61, 5) / 10.0)
    b = [range_error_bound(x, 0.5, 0.5, 0.2, 0.05) for x in p]
    return bool(np.all(np.diff(b) < 0)), "bound decreasing over 30..60 dB"


CHECKS = (
    ("closed-form DoF", check_theory),
    ("determinant identity", check_determinant),
    ("precoder construction", check_precoders),
    ("quantizer law and codec", check_quantizer),
    ("MAT subspace ranks", check_mat_ranks),
    ("range-error bound trend", check_range_bound),
)


def run_checks(seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS:
        passed, detail = fn(rng)
        out.append((name, bool(passed), detail))
    return out
