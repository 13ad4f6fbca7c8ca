"""
Static figures rendered next to the CSV output (Agg backend, no display).
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dof import baseline_dof, mat_dof, theoretical_dof, zf_dof  # noqa: E402

__all__ = ["plot_rates", "plot_dof"]

# no timestamps or version strings, so files are reproducible
_META = {"Software": None}


def plot_rates(samples, path):
    """Per-user rate vs ``P`` in dB, one line per ``(scheme, alpha)``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    curves = {}
    for s in samples:
        curves.setdefault((s.scheme, s.alpha), []).append((s.p_db, s.rate))
    for (scheme, alpha), pts in curves.items():
        x, y = zip(*sorted(pts))
        ax.plot(x, y, marker="o", label=f"{scheme}, alpha={alpha:g}")
    ax.set_xlabel("P (dB)")
    ax.set_ylabel("rate per user (bits/use)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_dof(alphas, measured, path):
    """Closed-form DoF curves with the measured hybrid slopes overlaid."""
    a = np.linspace(0.0, 1.2, 241)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(a, [theoretical_dof(x) for x in a], label="hybrid (theory)")
    ax.plot(a, [zf_dof(x) for x in a], "--", label="ZF")
    ax.plot(a, [mat_dof(x) for x in a], ":", label="MAT")
    ax.plot(a, [baseline_dof(x) for x in a], color="0.6", lw=0.8, label="max(ZF, MAT)")
    pts = [(x, measured[x]) for x in alphas if x in measured]
    if pts:
        ax.plot(*zip(*pts), "ko", label="hybrid (measured)")
    ax.set_xlabel("alpha")
    ax.set_ylabel("DoF per user")
    ax.set_ylim(0, 1.1)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path
