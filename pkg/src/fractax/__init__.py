"""Spectral toolkit for fractional attraction-repulsion chemotaxis systems."""

from .model import (
    CoeffBounds,
    CoefficientField,
    Field,
    Grid,
    ModelParams,
    State,
    coeff_bounds,
    make_field,
    make_grid,
    validate_params,
)
from .spectral import (
    SpectralWorkspace,
    fit_gradient_semigroup_constant,
    frac_heat,
    frac_laplacian,
    gradient,
    heat_kernel_profile,
    helmholtz_inverse,
    workspace_for,
)
from .signal import drift_field, gradient_bound_check, solve_signal
from .evolve import StepperConfig, Trajectory, cfl_dt, integrate, make_state, step, tendency
from .regimes import (
    Case,
    RegimeReport,
    asymptotic_band,
    build_report,
    classify,
    compute_C0,
    compute_M,
    persistence_check,
    table1_threshold,
)
from .diagnostics import (
    band_check,
    boundedness_check,
    drift_gap_check,
    kato_drift_bound,
    kato_integral,
    tail_stats,
)
from .eigen1d import TestFunction, rayleigh_sigma, sigma_sweep

__version__ = "0.1.0"
