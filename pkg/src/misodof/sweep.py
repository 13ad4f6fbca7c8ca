"""
Monte-Carlo power sweeps.

The trials of one ``(alpha, P, scheme)`` point are cut into fixed-size blocks.
Every block draws from its own generator, seeded by
``SeedSequence(seed, spawn_key=(alpha_index, p_index, scheme_id, block_index))``,
so a block's output does not depend on which worker ran it or when. Blocks
are merged in key order, which makes serial and parallel runs agree bit for
bit.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelState, CsitView, DopplerWindowSampler, crandn, make_csit, sample_iid_states
from .config import SCHEMES
from .linalg import build_precoders, logdet_capacity
from .quantizer import QuantizerSpec, bit_budget, quantize, truncation_level
from .receiver import EquivMimo, UNIFORM_NOISE_POWER, min_distance_decode, multicast_slots, \
    simulate_multicast, slots_for_bits
from .schemes import PowerAllocation, allocate_power, draw_codebooks, hybrid_phase1, \
    interference_power, mat_matrices, mat_rate, transmit_estimates, zf_baseline

__all__ = ["RateSample", "HybridPlan", "hybrid_plan", "hybrid_allocation", "run_sweep", "work_items", "run_block",
           "merge_blocks"]

SCHEME_IDS = {name: i for i, name in enumerate(SCHEMES)}
MIN_ETA_BAR = 0.5


@dataclass(frozen=True)
class RateSample:
    """Aggregated outcome of one ``(alpha, P, scheme)`` grid point.

    Fields that do not apply to a scheme are NaN.
    """

    alpha: float
    p_db: float
    scheme: str
    trials: int
    rate1: float
    rate2: float
    kappa: float = math.nan
    kappa_formula: float = math.nan
    beta_p: float = math.nan
    bits: float = math.nan
    interference_power: float = math.nan
    e_delta: float = math.nan
    e_mc: float = math.nan
    e_mimo: float = math.nan

    @property
    def rate(self):
        """Per-user rate averaged over the two users."""
        return 0.5 * (self.rate1 + self.rate2)

    @property
    def log2p(self):
        return self.p_db / (10.0 * math.log10(2.0))


# ---------------------------------------------------------------------------
# hybrid parameters per grid point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HybridPlan:
    """Deterministic per-point quantities of the hybrid scheme.

    ``multicast`` is False when the scheme runs in its zero-forcing mode
    (``alpha >= 1`` with the fallback enabled): a single zero-forced stream of
    power ``p/2`` per user, no quantization and no multicast, with residual
    interference treated as noise.
    """

    p: float
    alpha: float
    multicast: bool
    eta_bar: float
    bits: float
    kappa: float
    kappa_formula: float


def hybrid_allocation(plan):
    """Power split of the hybrid; the zero-forcing mode sends only the first stream."""
    if not plan.multicast:
        return PowerAllocation(plan.p, plan.p / 2.0, 0.0)
    return allocate_power(plan.p, plan.alpha)


def hybrid_plan(p, alpha, cfg):
    kappa_formula = multicast_slots(p, alpha, cfg.zeta, cfg.delta)
    if alpha >= 1 and cfg.zf_fallback:
        return HybridPlan(p, alpha, False, math.nan, 0.0, 0.0, kappa_formula)
    sigma = math.sqrt(min(1.0, p ** -alpha))
    eta_bar = max(truncation_level(p, cfg.zeta, sigma), MIN_ETA_BAR)
    bits = bit_budget(QuantizerSpec(eta_bar))
    return HybridPlan(p, alpha, True, eta_bar, bits, slots_for_bits(bits, p, cfg.delta), kappa_formula)


# ---------------------------------------------------------------------------
# block kernels
# ---------------------------------------------------------------------------

def _channels(n, m, p, alpha, cfg, rng):
    """Return ``(csit, true_state)``.

    With the Doppler model the transmitter's estimate is the one-step
    prediction, ``csit.state`` holds the receivers' own estimate, and the
    true state (used for the received samples) is returned separately.
    """
    if cfg.doppler is None:
        state = ChannelState(sample_iid_states(n, m, rng))
        return make_csit(state, alpha, p, rng), state
    true, est, pred = DopplerWindowSampler(cfg.doppler, p).draw(n, m, rng)
    csit = CsitView(ChannelState(est), pred[:, 0], pred[:, 1], min(1.0, p ** -alpha), alpha)
    return csit, ChannelState(true)


def _bilinear(a, b):
    return np.sum(a * b, axis=-1)


def _hybrid_block(n, p, alpha, cfg, rng):
    m = cfg.m
    plan = hybrid_plan(p, alpha, cfg)
    alloc = hybrid_allocation(plan)
    csit, true = _channels(n, m, p, alpha, cfg, rng)
    g_est, h_est = transmit_estimates(csit, rng)
    pre = build_precoders(g_est, h_est)
    size = 2 ** cfg.codebook_bits
    books = draw_codebooks(2 * n, size, alloc.lam, rng).reshape(2, n, size, 2)
    sent = rng.integers(0, size, size=(n, 2))
    rows = np.arange(n)
    u_tilde = books[0, rows, sent[:, 0]]
    v_tilde = books[1, rows, sent[:, 1]]
    frame = hybrid_phase1(csit, alloc, u_tilde, v_tilde, precoders=pre,
                          zeta=cfg.zeta, delta=cfg.delta, eps1=cfg.eps1, eps2=cfg.eps2)
    sig1, sig2 = interference_power(csit, alloc, pre)
    e = crandn(rng, (n, 2))
    h, g = true.h, true.g
    y1 = _bilinear(h, frame.x1) + e[:, 0]
    z1 = _bilinear(g, frame.x1) + e[:, 1]
    # residual from imperfect receiver estimates (zero without Doppler)
    r1 = _bilinear(h - csit.state.h, frame.x1)
    r2 = _bilinear(g - csit.state.g, frame.x1)
    s_rx = csit.state.s
    out = {"sig1": sig1, "extra1": np.abs(r1) ** 2, "extra2": np.abs(r2) ** 2, "sent": sent}

    if not plan.multicast:
        f1 = s_rx[:, :1] @ pre.w
        f2 = s_rx[:, 1:] @ pre.q
        out["rate1"] = logdet_capacity(f1, alloc.lam, (1.0 + sig1 + out["extra1"])[:, None])
        out["rate2"] = logdet_capacity(f2, alloc.lam, (1.0 + sig2 + out["extra2"])[:, None])
        d1 = min_distance_decode(EquivMimo(f1, y1[:, None], np.ones(1)), books[0])
        d2 = min_distance_decode(EquivMimo(f2, z1[:, None], np.ones(1)), books[1])
        out["decoded"] = np.stack([d1, d2], axis=-1)
        out["in_range"] = np.ones(n, bool)
        out["mc_ok"] = np.ones(n, bool)
        return out

    spec = QuantizerSpec(plan.eta_bar)
    eh1, xi1, ok1 = quantize(frame.eta1, spec)
    eh2, xi2, ok2 = quantize(frame.eta2, spec)
    n_slots = max(math.ceil(plan.kappa), 1)
    mc_states = sample_iid_states(n * n_slots, m, rng).reshape(n, n_slots, 2, m)
    out["mc_ok"] = simulate_multicast(plan.bits, plan.kappa, mc_states, p)
    out["in_range"] = ok1 & ok2
    out["xi1"] = np.abs(xi1) ** 2
    out["xi2"] = np.abs(xi2) ** 2
    out["f1"] = s_rx @ pre.w
    out["f2"] = s_rx @ pre.q
    obs1 = np.stack([y1 - eh1, eh2], axis=-1)
    obs2 = np.stack([eh1, z1 - eh2], axis=-1)
    d1 = min_distance_decode(EquivMimo(out["f1"], obs1, np.ones(2)), books[0])
    d2 = min_distance_decode(EquivMimo(out["f2"], obs2, np.ones(2)), books[1])
    out["decoded"] = np.stack([d1, d2], axis=-1)
    return out


def _zf_block(n, p, alpha, cfg, rng):
    csit, true = _channels(n, cfg.m, p, alpha, cfg, rng)
    if cfg.doppler is not None:
        csit = CsitView(true, csit.h_hat, csit.g_hat, csit.sigma2, alpha)
    z = zf_baseline(csit, p, rng)
    return {"rate1": z.rate1, "rate2": z.rate2}


def _mat_block(form):
    def kernel(n, p, alpha, cfg, rng):
        states = sample_iid_states(3 * n, cfg.m, rng).reshape(n, 3, 2, cfg.m)
        mats = mat_matrices(states, form, p)
        lam = p / cfg.m if form == "original" else p / (2 * cfg.m)
        r1, r2 = mat_rate(mats, lam)
        return {"rate1": r1, "rate2": r2}
    return kernel


KERNELS = {
    "zf": _zf_block,
    "mat": _mat_block("original"),
    "mat_variant": _mat_block("variant"),
    "hybrid": _hybrid_block,
}


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def work_items(cfg):
    """All ``(key, n)`` blocks of a sweep in canonical order.

    ``key = (alpha_index, p_index, scheme_id, block_index)``.
    """
    items = []
    n_blocks = -(-cfg.trials // cfg.block_size)
    for ai in range(len(cfg.alpha_list)):
        for pi in range(len(cfg.p_grid_db)):
            for scheme in cfg.schemes:
                for b in range(n_blocks):
                    n = min(cfg.block_size, cfg.trials - b * cfg.block_size)
                    items.append(((ai, pi, SCHEME_IDS[scheme], b), n))
    return items


def run_block(cfg, key, n):
    """Run one block; pure function of ``(cfg, key, n)``."""
    ai, pi, sid, _ = key
    alpha = cfg.alpha_list[ai]
    p = 10.0 ** (cfg.p_grid_db[pi] / 10.0)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=key))
    return KERNELS[SCHEMES[sid]](n, p, alpha, cfg, rng)


def _run_block_packed(args):
    return run_block(*args)


def merge_blocks(blocks):
    """Concatenate per-trial arrays of consecutive blocks, in the given order."""
    return {k: np.concatenate([b[k] for b in blocks]) for k in blocks[0]}


def _aggregate(cfg, alpha, p_db, scheme, data):
    p = 10.0 ** (p_db / 10.0)
    n = len(data["rate1"]) if "rate1" in data else len(data["f1"])
    if scheme != "hybrid":
        return RateSample(alpha, p_db, scheme, n, float(np.mean(data["rate1"])),
                          float(np.mean(data["rate2"])))
    plan = hybrid_plan(p, alpha, cfg)
    alloc = hybrid_allocation(plan)
    wrong = np.any(data["decoded"] != data["sent"], axis=-1)
    common = dict(kappa=plan.kappa, kappa_formula=plan.kappa_formula, beta_p=alloc.beta_p if alloc.p2 > 0 else math.nan,
                  bits=plan.bits, interference_power=float(np.mean(data["sig1"])),
                  e_delta=float(np.mean(~data["in_range"])), e_mc=float(np.mean(~data["mc_ok"])),
                  e_mimo=float(np.mean(wrong)))
    if not plan.multicast:
        return RateSample(alpha, p_db, scheme, n, float(np.mean(data["rate1"])),
                          float(np.mean(data["rate2"])), **common)
    ok = data["in_range"]
    x1 = float(np.mean(data["xi1"][ok])) if ok.any() else UNIFORM_NOISE_POWER
    x2 = float(np.mean(data["xi2"][ok])) if ok.any() else UNIFORM_NOISE_POWER
    ex1 = float(np.mean(data["extra1"]))
    ex2 = float(np.mean(data["extra2"]))
    n1 = np.array([1.0 + x1 + ex1, x2])
    n2 = np.array([x1, 1.0 + x2 + ex2])
    scale = 1.0 + plan.kappa
    r1 = float(np.mean(logdet_capacity(data["f1"], alloc.lam, n1))) / scale
    r2 = float(np.mean(logdet_capacity(data["f2"], alloc.lam, n2))) / scale
    return RateSample(alpha, p_db, scheme, n, r1, r2, **common)


def run_sweep(cfg, workers=None):
    """Run every ``(alpha, P, scheme)`` point of ``cfg``.

    Parameters
    ----------
    cfg : SimConfig
    workers : int, optional
        Process count; defaults to ``cfg.workers``. ``1`` runs in-process.

    Returns
    -------
    list of RateSample
        Ordered by alpha, then power, then scheme as listed in ``cfg``.
    """
    cfg.validate()
    workers = cfg.workers if workers is None else workers
    items = work_items(cfg)
    args = [(cfg, key, n) for key, n in items]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_block_packed, args, chunksize=1))
    else:
        results = [_run_block_packed(a) for a in args]

    groups = {}
    for (key, _), res in zip(items, results):
        groups.setdefault(key[:3], []).append(res)
    samples = []
    for (ai, pi, sid), blocks in groups.items():
        samples.append(_aggregate(cfg, cfg.alpha_list[ai], float(cfg.p_grid_db[pi]), SCHEMES[sid],
                                  merge_blocks(blocks)))
    return samples

