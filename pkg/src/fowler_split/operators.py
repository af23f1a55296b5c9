"""Fourier symbols of the model's linear operators and the singular-integral oracle.

The nonlocal term is the Fourier multiplier

    m(xi) = -a |xi|^lam + i b xi |xi|^(lam-1),

anti-diffusive (negative real part) at low frequency.  Adding the full or
partial heat symbol gives the two linear symbols used by the solver:

    full_symbol(xi)    = 4 pi^2 xi^2       + m(xi)
    reduced_symbol(xi) = 4 pi^2 eta xi^2   + m(xi)

so that full = reduced + 4 pi^2 epsilon xi^2 holds identically whenever
epsilon + eta = 1.  Both drift terms are imaginary; the symbols are
Hermitian (m(-xi) = conj m(xi)) and therefore map real fields to real
fields.  The default coefficients a = 2 pi^2 Gamma(2/3), b = sqrt(3) a
correspond to the lam = 4/3 dune-growth operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ToleranceNotMet, ZeroField
from .spectral import Field, apply_fourier_multiplier, force_real_nyquist, hs_norm, l2_norm

__all__ = [
    "SymbolSpec",
    "SymbolKind",
    "gamma_two_thirds",
    "default_coefficients",
    "symbol_nonlocal",
    "symbol_psi",
    "symbol_phi",
    "symbol_heat",
    "symbol_value",
    "alpha0",
    "beta0",
    "apply_nonlocal_spectral",
    "apply_nonlocal_quadrature",
    "hs_bound_ratio",
    "hs_bound_constant",
]

FOUR_PI_SQ = 4.0 * math.pi**2

#: scale mapping the raw singular integral onto the default symbol normalization
INTEGRAL_TO_SYMBOL = (2.0 * math.pi) ** (2.0 / 3.0)


def gamma_two_thirds() -> float:
    """Gamma(2/3), evaluated by the C library's Lanczos-class implementation."""
    return math.gamma(2.0 / 3.0)


def default_coefficients() -> tuple[float, float]:
    """Default (a, b) pair: a = 2 pi^2 Gamma(2/3), b = sqrt(3) * a."""
    a = 2.0 * math.pi**2 * gamma_two_thirds()
    return a, math.sqrt(3.0) * a


@dataclass(frozen=True)
class SymbolSpec:
    """Parameters defining every Fourier symbol used by the solver.

    epsilon is the viscosity handed to the nonlinear sub-flow, eta = 1 - epsilon
    stays with the linear sub-flow (stored as the complement, so the split is
    exact).  lam in (0, 2) is the order of the anti-diffusive multiplier; the
    coefficient defaults keep the lam = 4/3 values for every lam and can be
    overridden.
    """

    epsilon: float
    lam: float = 4.0 / 3.0
    a_i: float | None = None
    b_i: float | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.epsilon) and 0.0 <= self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not (np.isfinite(self.lam) and 0.0 < self.lam < 2.0):
            raise ValueError(f"lam must lie in (0, 2), got {self.lam}")
        a_default, b_default = default_coefficients()
        a = a_default if self.a_i is None else float(self.a_i)
        b = b_default if self.b_i is None else float(self.b_i)
        if not (a > 0 and b > 0):
            raise ValueError("a_i and b_i must be positive")
        object.__setattr__(self, "a_i", a)
        object.__setattr__(self, "b_i", b)

    @property
    def eta(self) -> float:
        return 1.0 - self.epsilon


class SymbolKind(str, Enum):
    """Tags for the four multiplier families."""

    NONLOCAL_I = "nonlocal_i"
    PSI_I = "psi_i"
    PHI_I = "phi_i"
    HEAT = "heat"


def _eval(xi, fn):
    arr = np.asarray(xi, dtype=np.float64)
    out = fn(arr)
    if arr.ndim == 0:
        return complex(out)
    return out


def symbol_nonlocal(spec: SymbolSpec, xi):
    """Multiplier of the anti-diffusive term: -a |xi|^lam + i b sgn(xi) |xi|^lam."""

    def fn(arr):
        mag = np.abs(arr) ** spec.lam
        return -spec.a_i * mag + 1j * spec.b_i * np.sign(arr) * mag

    return _eval(xi, fn)


def symbol_psi(spec: SymbolSpec, xi):
    """Full linear symbol: heat symbol at unit viscosity plus the nonlocal multiplier."""

    def fn(arr):
        return FOUR_PI_SQ * arr**2 + symbol_nonlocal(spec, arr)

    return _eval(xi, fn)


def symbol_phi(spec: SymbolSpec, xi):
    """Reduced linear symbol: heat symbol at viscosity eta plus the nonlocal multiplier.

    The drift part keeps the imaginary unit so that
    symbol_phi + 4 pi^2 epsilon xi^2 == symbol_psi holds identically.
    """

    def fn(arr):
        return FOUR_PI_SQ * spec.eta * arr**2 + symbol_nonlocal(spec, arr)

    return _eval(xi, fn)


def symbol_heat(spec: SymbolSpec, xi):
    """Heat symbol at viscosity epsilon: 4 pi^2 epsilon xi^2."""

    def fn(arr):
        return FOUR_PI_SQ * spec.epsilon * arr**2 + 0j

    return _eval(xi, fn)


_SYMBOL_TABLE = {
    SymbolKind.NONLOCAL_I: symbol_nonlocal,
    SymbolKind.PSI_I: symbol_psi,
    SymbolKind.PHI_I: symbol_phi,
    SymbolKind.HEAT: symbol_heat,
}


def symbol_value(spec: SymbolSpec, kind: SymbolKind, xi):
    """Evaluate one of the four symbols by tag."""
    return _SYMBOL_TABLE[SymbolKind(kind)](spec, xi)


def _neg_min_real(a: float, lam: float, diffusion: float) -> float:
    # minimize g(xi) = diffusion * xi^2 - a * xi^lam over xi >= 0; the minimizer
    # solves xi^(2-lam) = lam * a / (2 * diffusion)
    xi_star = (lam * a / (2.0 * diffusion)) ** (1.0 / (2.0 - lam))
    value = diffusion * xi_star**2 - a * xi_star**lam
    return -value


def alpha0(spec: SymbolSpec) -> float:
    """Negative of the minimum of Re(symbol_psi); growth rate of the full linear flow."""
    return _neg_min_real(spec.a_i, spec.lam, FOUR_PI_SQ)


def beta0(spec: SymbolSpec) -> float:
    """Negative of the minimum of Re(symbol_phi); growth rate of the reduced linear flow."""
    if spec.eta <= 0.0:
        raise ValueError("beta0 requires eta > 0 (epsilon < 1)")
    return _neg_min_real(spec.a_i, spec.lam, FOUR_PI_SQ * spec.eta)


def apply_nonlocal_spectral(spec: SymbolSpec, f: Field) -> Field:
    """Apply the anti-diffusive operator as a Fourier multiplier."""
    multiplier = force_real_nyquist(f.grid, symbol_nonlocal(spec, f.grid.frequencies))
    return apply_fourier_multiplier(f, multiplier)


def _composite_simpson(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n: int) -> float:
    if hi <= lo:
        return 0.0
    if n % 2 == 0:
        n += 1
    s = np.linspace(lo, hi, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (hi - lo) / (n - 1)
    return float(h / 3.0 * np.sum(w * fn(s)))


def apply_nonlocal_quadrature(
    d2f: Callable[[np.ndarray], np.ndarray],
    x: float,
    xi_max: float,
    *,
    support: tuple[float, float] = (-16.0, 16.0),
    tol: float = 1e-10,
    n_points: int = 2049,
) -> float:
    """Singular-integral route for the anti-diffusive operator at one point.

    Integrates xi^(-1/3) * d2f(x - xi) over (0, xi_max] after the cube-root
    substitution xi = s^3, which turns the integrand into the smooth
    3 s * d2f(x - s^3) and removes the endpoint singularity.  The result is
    scaled by (2 pi)^(2/3) so that its Fourier multiplier coincides with
    symbol_nonlocal at the default coefficients (lam = 4/3).

    d2f is the second derivative of the profile; support = (y_lo, y_hi) is an
    interval outside which d2f is negligible, used to place the quadrature
    window.  Raises ToleranceNotMet when the truncated tail beyond xi_max is
    estimated above tol.
    """
    y_lo, y_hi = support
    if y_hi <= y_lo:
        raise ValueError("support interval must be nonempty")
    if xi_max <= 0:
        raise ValueError("xi_max must be positive")

    # crude tail probe: integrand magnitude just beyond the truncation point,
    # weighted by the truncation scale
    probes = xi_max * (1.0 + np.arange(17) / 16.0)
    probe_vals = np.abs(probes ** (-1.0 / 3.0) * np.asarray(d2f(x - probes), dtype=np.float64))
    tail_estimate = float(np.max(probe_vals)) * xi_max
    if tail_estimate > tol:
        raise ToleranceNotMet(
            f"estimated truncation tail {tail_estimate:.3e} exceeds tol {tol:.1e}; "
            f"increase xi_max (currently {xi_max})"
        )

    xi_lo = max(0.0, x - y_hi)
    xi_hi = min(float(xi_max), x - y_lo)
    if xi_hi <= xi_lo:
        return 0.0

    def integrand(s: np.ndarray) -> np.ndarray:
        return 3.0 * s * np.asarray(d2f(x - s**3), dtype=np.float64)

    raw = _composite_simpson(integrand, xi_lo ** (1.0 / 3.0), xi_hi ** (1.0 / 3.0), n_points)
    return INTEGRAL_TO_SYMBOL * raw


def hs_bound_constant(spec: SymbolSpec) -> float:
    """Peak modulus factor of the nonlocal multiplier, sqrt(a^2 + b^2).

    For the default coefficients this equals 4 pi^2 Gamma(2/3), the sharp
    Sobolev-shift bound of the lam = 4/3 operator.
    """
    return math.hypot(spec.a_i, spec.b_i)


def hs_bound_ratio(spec: SymbolSpec, f: Field, s: float) -> float:
    """Sobolev quotient of the nonlocal operator: |I f|_{s - 4/3} / |f|_s.

    Bounded by hs_bound_constant(spec) for lam = 4/3.
    """
    if l2_norm(f) == 0.0:
        raise ZeroField("hs_bound_ratio requires a nonzero field")
    image = apply_nonlocal_spectral(spec, f)
    return hs_norm(image, s - 4.0 / 3.0) / hs_norm(f, s)
