"""
CSV and metadata output of a sweep.

All tables are RFC-4180 CSV (``csv`` module, CRLF line ends) with a header
row and a fixed column order; floats carry 9 significant digits and
quantities that do not apply are left empty.
"""
import csv
import math
import os

from .config import config_to_text
from .dof import mat_dof, theoretical_dof, zf_dof

__all__ = ["SAMPLE_COLUMNS", "DOF_COLUMNS", "ESTIMATE_COLUMNS", "format_float", "emit_report",
           "write_theory", "theory_rows"]

SAMPLE_COLUMNS = ("alpha", "p_db", "scheme", "trials", "rate_user1", "rate_user2", "rate",
                  "kappa", "kappa_formula", "beta_p", "bits", "interference_power",
                  "freq_e_delta", "freq_e_mc", "freq_e_mimo")
DOF_COLUMNS = ("alpha", "hybrid_measured", "hybrid_theory", "zf_theory", "mat_theory")
ESTIMATE_COLUMNS = ("alpha", "scheme", "slope", "stderr", "p_db_min", "p_db_max", "n_points")

SAMPLES_FILE = "samples.csv"
DOF_FILE = "dof_vs_alpha.csv"
ESTIMATES_FILE = "dof_estimates.csv"
METADATA_FILE = "run_config.txt"


def format_float(x):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".9g")


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format_float(v)


def _write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _sample_row(s):
    return (s.alpha, s.p_db, s.scheme, s.trials, s.rate1, s.rate2, s.rate, s.kappa,
            s.kappa_formula, s.beta_p, s.bits, s.interference_power, s.e_delta, s.e_mc, s.e_mimo)


def theory_rows(alphas, measured=None):
    measured = measured or {}
    return [(a, measured.get(a), theoretical_dof(a), zf_dof(a), mat_dof(a)) for a in alphas]


def write_theory(out, alphas):
    """Write the closed-form curves only; the measured column stays empty."""
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, DOF_FILE)
    _write(path, DOF_COLUMNS, theory_rows(alphas))
    return path


def emit_report(samples, estimates, cfg, out=None, plots=True):
    """Write samples, DoF table, slope estimates and the run metadata.

    Returns the list of written paths.
    """
    from .errors import ConfigError

    if not samples:
        raise ConfigError("no samples to report")
    cfg.validate()
    out = cfg.out if out is None else out
    os.makedirs(out, exist_ok=True)
    paths = []

    p = os.path.join(out, SAMPLES_FILE)
    _write(p, SAMPLE_COLUMNS, [_sample_row(s) for s in samples])
    paths.append(p)

    measured = {e.alpha: e.slope for e in estimates if e.scheme == "hybrid"}
    p = os.path.join(out, DOF_FILE)
    _write(p, DOF_COLUMNS, theory_rows(cfg.alpha_list, measured))
    paths.append(p)

    p = os.path.join(out, ESTIMATES_FILE)
    _write(p, ESTIMATE_COLUMNS, [(e.alpha, e.scheme, e.slope, e.stderr, e.p_db_min, e.p_db_max,
                                  e.n_points) for e in estimates])
    paths.append(p)

    p = os.path.join(out, METADATA_FILE)
    with open(p, "w", encoding="utf-8") as fh:
        fh.write("# misodof run configuration; replay with: misodof sweep --config <this file>\n")
        fh.write(config_to_text(cfg))
    paths.append(p)

    if plots:
        from .plotting import plot_dof, plot_rates

        paths.append(plot_rates(samples, os.path.join(out, "rates.png")))
        paths.append(plot_dof(cfg.alpha_list, measured, os.path.join(out, "dof_vs_alpha.png")))
    return paths
