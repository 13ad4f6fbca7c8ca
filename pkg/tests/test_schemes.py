import math

import numpy as np
import pytest

from misodof.channel import ChannelState, CsitView, crandn, make_csit, sample_iid_states
from misodof.errors import ContractError, DomainError
from misodof.linalg import build_precoders
from misodof.schemes import (allocate_power, draw_codebook, hybrid_phase1, interference_power,
                             mat_matrices, mat_original, mat_rate, mat_variant, zf_baseline)

P_DB = np.arange(30, 61, 5)


def _fit(x_db, y):
    return np.polyfit(np.asarray(x_db) / (10 * math.log10(2)), y, 1)[0]


def test_allocation_examples():
    a = allocate_power(100, 0.5)
    assert a.p2 == pytest.approx(10) and a.p1 == pytest.approx(40)
    a = allocate_power(1e4, 0.0)
    assert a.p1 == a.p2 == 2500
    assert allocate_power(1e4, 1.5).p2 == 1
    logs = [math.log(allocate_power(10 ** (d / 10), 0.3).p2) for d in P_DB]
    slope = np.polyfit([math.log(10 ** (d / 10)) for d in P_DB], logs, 1)[0]
    assert slope == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(DomainError):
        allocate_power(2, 0.5)


def _csit(rng, n=1, alpha=0.5, p=1e3, m=2):
    st = ChannelState(sample_iid_states(n, m, rng))
    return make_csit(st, alpha, p, rng)


def test_no_interference_without_signal(rng):
    c = _csit(rng, 10)
    alloc = allocate_power(1e3, 0.5)
    fr = hybrid_phase1(c, alloc, crandn(rng, (10, 2)), np.zeros((10, 2)))
    assert np.all(fr.eta1 == 0)


def test_perfect_csit_exact_zf(rng):
    st = ChannelState(sample_iid_states(10, 2, rng))
    c = CsitView(st, st.h, st.g, 0.0, np.inf)
    alloc = allocate_power(1e3, 0.5)
    u = crandn(rng, (10, 2)) * [1, 0]
    v = crandn(rng, (10, 2)) * [1, 0]
    fr = hybrid_phase1(c, alloc, u, v)
    assert np.max(np.abs(fr.eta1)) < 1e-12 and np.max(np.abs(fr.eta2)) < 1e-12


def test_eta_re_expansion(rng):
    c = _csit(rng, 100)
    alloc = allocate_power(1e3, 0.5)
    pre = build_precoders(c.g_hat, c.h_hat)
    v = crandn(rng, (100, 2))
    fr = hybrid_phase1(c, alloc, crandn(rng, (100, 2)), v, precoders=pre)
    q = pre.q
    expand = (np.sum(c.delta * q[..., 0], -1) * v[:, 0] + np.sum(c.state.h * q[..., 1], -1) * v[:, 1])
    np.testing.assert_allclose(fr.eta1, expand, atol=1e-12)


def test_phase1_dimension_check(rng):
    c = _csit(rng, 1)
    with pytest.raises(ContractError):
        hybrid_phase1(c, allocate_power(1e3, 0.5), np.ones((1, 3)), np.ones((1, 2)))


def test_interference_power_oracle(rng):
    c = _csit(rng, 1, alpha=0.3)
    alloc = allocate_power(1e3, 0.3)
    pre = build_precoders(c.g_hat, c.h_hat)
    sig1, sig2 = interference_power(c, alloc, pre)
    n = 200_000
    v = crandn(rng, (n, 2)) * np.sqrt(alloc.lam)
    u = crandn(rng, (n, 2)) * np.sqrt(alloc.lam)
    fr = hybrid_phase1(c, alloc, u, v, precoders=pre)
    e1 = np.abs(fr.eta1) ** 2
    e2 = np.abs(fr.eta2) ** 2
    assert abs(e1.mean() - sig1[0]) < 3 * e1.std() / math.sqrt(n)
    assert abs(e2.mean() - sig2[0]) < 3 * e2.std() / math.sqrt(n)


def test_interference_power_zero_cases(rng):
    st = ChannelState(sample_iid_states(5, 2, rng))
    c = CsitView(st, st.h, st.g, 0.0, np.inf)
    alloc = allocate_power(1e3, 0.5)
    alloc = type(alloc)(alloc.p, alloc.p1, 0.0)
    sig1, _ = interference_power(c, alloc, build_precoders(st.g, st.h))
    assert np.max(sig1) < 1e-20


def test_interference_power_exponent(rng):
    sig = []
    for d in P_DB:
        p = 10 ** (d / 10)
        c = _csit(rng, 20_000, alpha=0.5, p=p)
        s1, _ = interference_power(c, allocate_power(p, 0.5), build_precoders(c.g_hat, c.h_hat))
        sig.append(np.log2(s1.mean()))
    assert _fit(P_DB, sig) == pytest.approx(0.5, abs=0.1)


def test_codebook_shape(rng):
    cb = draw_codebook(3, [4.0, 1.0], rng)
    assert cb.size == 8 and cb.entries.shape == (8, 2)
    assert draw_codebook(40, [1, 1], np.random.default_rng(0)).size == 2 ** 16


# MAT

def _mat_states(rng, n=1, m=2):
    return sample_iid_states(3 * n, m, rng).reshape(n, 3, 2, m)


@pytest.mark.parametrize("form", ["original", "variant"])
def test_mat_ranks(rng, form):
    mats = mat_matrices(_mat_states(rng, 1000), form, 1e3)
    for a, b in ((mats.a1, mats.b1), (mats.a2, mats.b2)):
        assert np.all(np.linalg.matrix_rank(a, tol=1e-8) == 2)
        assert np.all(np.linalg.matrix_rank(b, tol=1e-8) == 1)


def test_mat_original_observations(rng):
    s = _mat_states(rng, 1)[0]
    u, v = crandn(rng, 2), crandn(rng, 2)
    y, z, mats = mat_original(s, u, v, 1e3, noise=False)
    h, g = s[:, 0], s[:, 1]
    c = mats.scale[1]
    assert y[0] == pytest.approx(h[0] @ u)
    assert y[1] == pytest.approx(h[1] @ v)
    assert y[2] == pytest.approx(c * h[2, 0] * (g[0] @ u + h[1] @ v))
    assert z[2] == pytest.approx(c * g[2, 0] * (g[0] @ u + h[1] @ v))
    y0, _, _ = mat_original(s, np.zeros(2), v, 1e3, noise=False)
    assert y0[0] == 0


def test_mat_variant_observations(rng):
    s = _mat_states(rng, 1)[0]
    u, v = crandn(rng, 2), crandn(rng, 2)
    y, z, mats = mat_variant(s, u, v, 1e3, noise=False)
    h, g = s[:, 0], s[:, 1]
    c2, c3 = mats.scale
    assert y[0] == pytest.approx(h[0] @ (u + v))
    assert y[1] == pytest.approx(c2 * h[1, 0] * (h[0] @ v))
    assert z[2] == pytest.approx(c3 * g[2, 0] * (g[0] @ u))
    y0, _, _ = mat_variant(s, u, np.zeros(2), 1e3, noise=False)
    assert y0[1] == 0


def test_mat_slot_power_respected(rng):
    p = 1e3
    s = _mat_states(rng, 5000)
    mats = mat_matrices(s, "original", p)
    lam = p / 2
    g1, h2 = s[:, 0, 1], s[:, 1, 0]
    power3 = mats.scale[:, 1] ** 2 * lam * (np.sum(np.abs(g1) ** 2, -1) + np.sum(np.abs(h2) ** 2, -1))
    assert np.all(power3 <= p * (1 + 1e-12))


def test_mat_noise_requires_rng(rng):
    with pytest.raises(ContractError):
        mat_original(_mat_states(rng)[0], np.ones(2), np.ones(2), 10.0, rng=None)
    with pytest.raises(ContractError):
        mat_matrices(_mat_states(rng), "other", 10.0)


@pytest.mark.parametrize("form", ["original", "variant"])
def test_mat_slope(rng, form):
    rates = []
    for d in P_DB:
        p = 10 ** (d / 10)
        mats = mat_matrices(_mat_states(rng, 4000), form, p)
        r1, r2 = mat_rate(mats, p / 2 if form == "original" else p / 4)
        rates.append(0.5 * (r1.mean() + r2.mean()))
    assert _fit(P_DB, rates) == pytest.approx(2 / 3, abs=0.07)


# ZF

@pytest.mark.parametrize("alpha,target", [(60.0, 1.0), (0.0, 0.0), (0.5, 0.5)])
def test_zf_slope(rng, alpha, target):
    rates = []
    for d in P_DB:
        p = 10 ** (d / 10)
        z = zf_baseline(_csit(rng, 5000, alpha=alpha, p=p), p, rng)
        rates.append(0.5 * (z.rate1.mean() + z.rate2.mean()))
    assert _fit(P_DB, rates) == pytest.approx(target, abs=0.07)


def test_zf_perfect_csit_no_leakage(rng):
    st = ChannelState(sample_iid_states(50, 3, rng))
    z = zf_baseline(CsitView(st, st.h, st.g, 0.0, np.inf), 1e3)
    from misodof.linalg import null_direction
    w1 = null_direction(st.g)
    np.testing.assert_allclose(z.sinr1, np.abs(np.sum(st.h * w1, -1)) ** 2 * 500, rtol=1e-12)
