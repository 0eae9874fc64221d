"""dwcross: bound-state spectra and avoided crossings of 1D double wells.

Analytic characteristic equations for four solvable double-well variants,
a bracketing root solver, a finite-difference/Sturm-sequence oracle that
independently validates every level, and parameter-sweep machinery that
locates and refines avoided crossings.
"""

from ._kernels import BACKEND as kernel_backend
from .models import (
    CharacteristicEvaluation,
    M1Params,
    M2Params,
    M3Params,
    M4Params,
    ModelParams,
    UnitsConfig,
    char_m1,
    char_m2,
    char_m3,
    char_m4,
    characteristic,
)
from .oracle import OracleConfig, oracle_levels, wronskian_constancy
from .rootfind import RootfindConfig, solve_levels
from .specfun import log_gamma_signed, pcf_at_zero, recip_gamma
from .sweep import (
    AvoidedCrossing,
    SpectrumTable,
    SweepSpec,
    detect_avoided_crossings,
    effective_levels,
    gap_curves,
    sweep_levels,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "UnitsConfig",
    "M1Params",
    "M2Params",
    "M3Params",
    "M4Params",
    "ModelParams",
    "CharacteristicEvaluation",
    "char_m1",
    "char_m2",
    "char_m3",
    "char_m4",
    "characteristic",
    "log_gamma_signed",
    "recip_gamma",
    "pcf_at_zero",
    "RootfindConfig",
    "solve_levels",
    "OracleConfig",
    "oracle_levels",
    "wronskian_constancy",
    "SweepSpec",
    "SpectrumTable",
    "AvoidedCrossing",
    "sweep_levels",
    "gap_curves",
    "detect_avoided_crossings",
    "effective_levels",
    "__version__",
]
