"""Split-step Fourier solver for a nonlocal dune-growth conservation law.

The model couples a Burgers flux, Laplacian diffusion, and an anti-diffusive
fractional multiplier.  The solver splits the dynamics into an exact spectral
linear flow and a finite-difference viscous Burgers flow, composes them with
first-order Lie or second-order Strang formulas, and measures temporal order
by self-convergence.
"""

from .convergence import (
    ConvergenceReport,
    StudySpec,
    default_study,
    fit_order,
    make_initial_data,
    run_study,
    self_convergence_error,
)
from .errors import (
    BlowUpDetected,
    CflViolation,
    DegenerateFit,
    FowlerSplitError,
    InvalidConfig,
    NegativeTime,
    NonHermitianInput,
    QuadratureFailure,
    SpatialFloorReached,
    SupportTooWide,
    ToleranceNotMet,
    ZeroField,
)
from .flows import (
    BurgersStepper,
    LinearPropagator,
    burgers_flow,
    burgers_substep,
    cfl_dt,
    hopf_cole_oracle,
    linear_flow,
)
from .operators import (
    SymbolKind,
    SymbolSpec,
    alpha0,
    apply_nonlocal_quadrature,
    apply_nonlocal_spectral,
    beta0,
    default_coefficients,
    gamma_two_thirds,
    hs_bound_constant,
    hs_bound_ratio,
    symbol_nonlocal,
    symbol_phi,
    symbol_psi,
)
from .spectral import Field, SpectralField, SpectralGrid, forward_dft, hs_norm, inverse_dft, l2_norm
from .splitting import SchemeKind, SchemeSpec, Trajectory, evolve, reference_solution, split_step

__version__ = "0.1.0"

__all__ = [
    "BlowUpDetected",
    "BurgersStepper",
    "CflViolation",
    "ConvergenceReport",
    "DegenerateFit",
    "Field",
    "FowlerSplitError",
    "InvalidConfig",
    "LinearPropagator",
    "NegativeTime",
    "NonHermitianInput",
    "QuadratureFailure",
    "SchemeKind",
    "SchemeSpec",
    "SpatialFloorReached",
    "SpectralField",
    "SpectralGrid",
    "StudySpec",
    "SupportTooWide",
    "SymbolKind",
    "SymbolSpec",
    "ToleranceNotMet",
    "Trajectory",
    "ZeroField",
    "alpha0",
    "apply_nonlocal_quadrature",
    "apply_nonlocal_spectral",
    "beta0",
    "burgers_flow",
    "burgers_substep",
    "cfl_dt",
    "default_coefficients",
    "default_study",
    "evolve",
    "fit_order",
    "forward_dft",
    "gamma_two_thirds",
    "hopf_cole_oracle",
    "hs_bound_constant",
    "hs_bound_ratio",
    "hs_norm",
    "inverse_dft",
    "l2_norm",
    "linear_flow",
    "make_initial_data",
    "reference_solution",
    "run_study",
    "self_convergence_error",
    "split_step",
    "symbol_nonlocal",
    "symbol_phi",
    "symbol_psi",
]
