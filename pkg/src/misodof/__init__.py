"""
Degrees-of-freedom simulator for the two-user MISO broadcast channel with
delayed and imperfect current CSIT.

Modules: ``linalg`` (precoders, log-det rates), ``channel`` (fading and
CSIT models), ``schemes`` (ZF, MAT, hybrid phase 1), ``quantizer``,
``receiver`` (multicast, equivalent MIMO, error events) and the harness
(``config``, ``sweep``, ``dof``, ``report``, ``cli``).
"""
from .config import SimConfig
from .dof import DofEstimate, baseline_dof, fit_dof, theoretical_dof
from .sweep import RateSample, run_sweep

__version__ = "0.1.0"

__all__ = ["SimConfig", "RateSample", "DofEstimate", "run_sweep", "fit_dof", "theoretical_dof",
           "baseline_dof", "__version__"]
