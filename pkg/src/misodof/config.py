"""
Simulation configuration and its flat ``key = value`` text form.

Every CLI flag has a twin key here; values given on the command line
override the file. A run's configuration is echoed in the same format, so
the echo can be fed back with ``--config`` to replay the run.
"""
import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import DopplerConfig, doppler_alpha
from .errors import ConfigError, DomainError

__all__ = ["SCHEMES", "SimConfig", "parse_pgrid", "parse_config_text", "load_config", "config_to_text"]

SCHEMES = ("zf", "mat", "mat_variant", "hybrid")
DOPPLER_SCHEMES = ("zf", "hybrid")


def _default_grid():
    return tuple(float(x) for x in range(30, 61, 5))


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one Monte-Carlo sweep.

    ``alphas`` is ignored when ``doppler`` is set; the CSIT quality then
    follows from the Doppler frequency as ``1 - 2F``.
    """

    m: int = 2
    alphas: tuple = (0.5,)
    doppler: Optional[DopplerConfig] = None
    p_grid_db: tuple = field(default_factory=_default_grid)
    trials: int = 10_000
    seed: int = 0
    schemes: tuple = SCHEMES
    zeta: float = 0.2
    delta: float = 0.05
    eps: float = 0.05
    eps1: float = 0.1
    eps2: float = 0.1
    codebook_bits: int = 4
    block_size: int = 2500
    workers: int = 1
    zf_fallback: bool = True
    out: str = "results"

    def validate(self):
        """Raise :class:`ConfigError` on any violation; return ``self`` otherwise."""
        grid = np.asarray(self.p_grid_db, dtype=float)
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ConfigError("p_grid_db must be strictly increasing with at least 2 points")
        if grid[0] <= 10 * np.log10(2):
            raise ConfigError("all grid powers must exceed 2 (about 3 dB)")
        if self.trials < 100:
            raise ConfigError("trials per point must be at least 100")
        if not self.schemes:
            raise ConfigError("empty scheme set")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigError(f"unknown schemes {sorted(unknown)}")
        if self.m < 2:
            raise ConfigError("need m >= 2 antennas")
        if self.doppler is None:
            if not self.alphas or any(a < 0 for a in self.alphas):
                raise ConfigError("alphas must be a non-empty list of nonnegative values")
        elif set(self.schemes) - set(DOPPLER_SCHEMES):
            raise ConfigError("the Doppler model supports only the zf and hybrid schemes")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if not self.zeta > self.eps > 0:
            raise ConfigError("need zeta > eps > 0")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ConfigError("eps1 and eps2 must be positive")
        if not 0 <= self.codebook_bits <= 10:
            raise ConfigError("codebook_bits must lie in [0, 10]")
        if self.block_size < 1 or self.workers < 1:
            raise ConfigError("block_size and workers must be positive")
        return self

    @property
    def alpha_list(self):
        if self.doppler is not None:
            return (doppler_alpha(self.doppler)[1],)
        return tuple(float(a) for a in self.alphas)


def parse_pgrid(text):
    """``'30:5:60'`` (start:step:stop, inclusive) or ``'30,40,50'``."""
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ConfigError("grid step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(float(start + i * step) for i in range(n))
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad power grid {text!r}") from exc


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


_SCALARS = {
    "m": int, "trials": int, "seed": int, "codebook_bits": int, "block_size": int,
    "workers": int, "zeta": float, "delta": float, "eps": float, "eps1": float,
    "eps2": float, "out": str, "zf_fallback": _bool,
}
_DOPPLER_KEYS = ("doppler", "doppler_f", "gamma", "doppler_window")


def parse_config_text(text, base=None):
    """Apply ``key = value`` lines to ``base`` (default :class:`SimConfig`)."""
    base = SimConfig() if base is None else base
    updates, dop = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _SCALARS:
                updates[key] = _SCALARS[key](value)
            elif key == "alpha":
                updates["alphas"] = _floats(value)
            elif key == "pgrid":
                updates["p_grid_db"] = parse_pgrid(value)
            elif key == "schemes":
                updates["schemes"] = tuple(s.strip() for s in value.split(",") if s.strip())
            elif key in _DOPPLER_KEYS:
                dop[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    cfg = dataclasses.replace(base, **updates)
    if dop:
        cfg = dataclasses.replace(cfg, doppler=_doppler_from(dop, cfg.doppler))
    return cfg


def _doppler_from(keys, current):
    kw = dataclasses.asdict(current) if current is not None else {}
    if "doppler" in keys:
        parts = _floats(keys["doppler"])
        if len(parts) != 4:
            raise ConfigError("doppler expects v,fc,tf,c")
        kw.update(v=parts[0], fc=parts[1], tf=parts[2], c=parts[3], f=None)
    if "doppler_f" in keys:
        kw["f"] = float(keys["doppler_f"])
    if "gamma" in keys:
        kw["gamma"] = float(keys["gamma"])
    if "doppler_window" in keys:
        kw["window"] = int(keys["doppler_window"])
    try:
        return DopplerConfig(**kw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base)


def config_to_text(cfg):
    """Serialise ``cfg`` so that :func:`parse_config_text` restores it exactly."""
    lines = [
        f"m = {cfg.m}",
        f"alpha = {','.join(repr(float(a)) for a in cfg.alphas)}",
        f"pgrid = {','.join(repr(float(p)) for p in cfg.p_grid_db)}",
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"schemes = {','.join(cfg.schemes)}",
        f"zeta = {cfg.zeta!r}",
        f"delta = {cfg.delta!r}",
        f"eps = {cfg.eps!r}",
        f"eps1 = {cfg.eps1!r}",
        f"eps2 = {cfg.eps2!r}",
        f"codebook_bits = {cfg.codebook_bits}",
        f"block_size = {cfg.block_size}",
        f"workers = {cfg.workers}",
        f"zf_fallback = {str(cfg.zf_fallback).lower()}",
        f"out = {cfg.out}",
    ]
    d = cfg.doppler
    if d is not None:
        lines.append(f"doppler = {d.v!r},{d.fc!r},{d.tf!r},{d.c!r}")
        if d.f is not None:
            lines.append(f"doppler_f = {d.f!r}")
        lines.append(f"gamma = {d.gamma!r}")
        lines.append(f"doppler_window = {d.window}")
    return "\n".join(lines) + "\n"
