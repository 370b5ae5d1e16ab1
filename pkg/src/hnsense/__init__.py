"""Steady-state sensing metrics for coherently driven coupled chiral chains.

A pair of parametrically coupled bosonic lattices with asymmetric effective
hopping amplifies an injected coherent tone end-to-end.  This package builds
the squeezed-basis dynamical matrix of the mean-field equations, solves for
the steady state, and reports homodyne signal power, noise power, photon
budget, and SNR per photon under two perturbations (boundary tunneling and a
local detuning), together with closed-form cross-checks, parameter sweeps,
scaling-exponent fits, and an independent time-domain oracle.
"""

from .errors import (
    DegenerateError,
    DivergenceError,
    DomainError,
    SingularError,
    StepSizeError,
)
from .model import (
    LOCALN,
    NHSE,
    ChainParams,
    DriveSpec,
    HomodyneSpec,
    PerturbationSpec,
    amplification_eta,
    chain_from_gain,
    derive_params,
)
from .dynamics import (
    DynMatrix,
    OutputCoeffs,
    SteadyMeans,
    build_h_block,
    build_htilde,
    invert,
    output_fluct_coeffs,
    steady_means,
)
from .closedform import (
    ColumnPattern,
    ExactFirstColumn,
    dyson_first_order,
    h_inverse_column,
    htilde_inverse_exact_first_column,
)
from .metrics import (
    BEYOND,
    LINEAR,
    SensingReport,
    noise_power,
    photon_total,
    signal_power,
    snr_dominant_closed,
    snr_report,
)
from .optimize import (
    FitResult,
    SweepGrid,
    best_amplification,
    best_measurement_angle,
    fit_scaling_exponent,
    optimal_eta_vn,
    sweep,
)
from .oracle import OdeRun, column_solve_inverse, integrate_means

__version__ = "0.1.0"

__all__ = [
    "DomainError", "SingularError", "DegenerateError", "DivergenceError",
    "StepSizeError",
    "ChainParams", "DriveSpec", "PerturbationSpec", "HomodyneSpec",
    "NHSE", "LOCALN", "derive_params", "chain_from_gain", "amplification_eta",
    "DynMatrix", "SteadyMeans", "OutputCoeffs",
    "build_h_block", "build_htilde", "invert", "steady_means",
    "output_fluct_coeffs",
    "ColumnPattern", "ExactFirstColumn", "h_inverse_column",
    "dyson_first_order", "htilde_inverse_exact_first_column",
    "LINEAR", "BEYOND", "SensingReport", "signal_power", "noise_power",
    "photon_total", "snr_report", "snr_dominant_closed",
    "SweepGrid", "FitResult", "best_measurement_angle", "optimal_eta_vn",
    "best_amplification", "sweep", "fit_scaling_exponent",
    "OdeRun", "integrate_means", "column_solve_inverse",
    "__version__",
]
