"""The two sub-flows composed by the splitting schemes.

The linear sub-flow advances v_t + I[v] - eta v_xx = 0 exactly in time by
multiplying the spectrum with exp(-t * reduced symbol).  The nonlinear
sub-flow advances the viscous Burgers equation w_t + (w^2/2)_x = eps w_xx
with an explicit centered scheme under the advection-diffusion stability
bound dt <= min(dx/|v|, dx^2/(2 eps)).  A closed-form heat-kernel quotient
serves as the exact-solution oracle for the Burgers flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CflViolation, NegativeTime, QuadratureFailure
from .operators import SymbolSpec, symbol_phi
from .spectral import Field, SpectralGrid, apply_fourier_multiplier

__all__ = [
    "LinearPropagator",
    "BurgersStepper",
    "linear_flow",
    "burgers_substep",
    "burgers_flow",
    "burgers_substep_count",
    "cfl_dt",
    "hopf_cole_oracle",
]

#: velocity floor keeping the advective bound finite on (near-)zero fields
V_FLOOR = 1e-12

#: relative slack accepted when checking a substep against the stability bound
CFL_SLACK = 1e-9


@dataclass(frozen=True)
class LinearPropagator:
    """Exact spectral propagator of the linear sub-flow, with per-duration multiplier cache."""

    grid: SpectralGrid
    spec: SymbolSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def multipliers(self, t: float) -> np.ndarray:
        """exp(-t * reduced symbol) on the grid frequencies, real at the Nyquist bin.

        The Nyquist entry drops the imaginary part of the symbol (not of the
        exponential), so composing multipliers stays an exact semigroup there.
        """
        key = float(t)
        cached = self._cache.get(key)
        if cached is None:
            phi = symbol_phi(self.spec, self.grid.frequencies)
            phi[self.grid.nyquist_index] = phi[self.grid.nyquist_index].real
            cached = np.exp(-key * phi)
            cached.flags.writeable = False
            self._cache[key] = cached
        return cached


def linear_flow(prop: LinearPropagator, f: Field, t: float) -> Field:
    """Advance the linear sub-flow by time t (exact in time)."""
    if t < 0:
        raise NegativeTime(f"linear_flow requires t >= 0, got {t}")
    if t == 0:
        return f
    return apply_fourier_multiplier(f, prop.multipliers(t))


@dataclass(frozen=True)
class BurgersStepper:
    """Explicit centered finite-difference stepper for the viscous Burgers sub-flow.

    dtau_cap optionally caps the substep size below the stability bound; floor
    probes use it to keep two runs on a common substep grid.
    """

    grid: SpectralGrid
    epsilon: float
    cfl_safety: float = 0.9
    dtau_cap: float | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.dtau_cap is not None and not self.dtau_cap > 0:
            raise ValueError(f"dtau_cap must be positive, got {self.dtau_cap}")


def _cfl_bound(stepper: BurgersStepper, values: np.ndarray) -> float:
    dx = stepper.grid.dx
    vmax = max(float(np.max(np.abs(values))), V_FLOOR)
    return stepper.cfl_safety * min(dx / vmax, dx * dx / (2.0 * stepper.epsilon))


def cfl_dt(stepper: BurgersStepper, u: Field) -> float:
    """Largest admissible substep for the current field: safety * min(dx/|v|, dx^2/(2 eps))."""
    return _cfl_bound(stepper, u.values)


def _substep_values(stepper: BurgersStepper, values: np.ndarray, dtau: float) -> np.ndarray:
    dx = stepper.grid.dx
    half_sq = 0.5 * values * values
    flux_diff = np.roll(half_sq, -1) - np.roll(half_sq, 1)
    laplacian = np.roll(values, -1) - 2.0 * values + np.roll(values, 1)
    return values - (dtau / (2.0 * dx)) * flux_diff + (stepper.epsilon * dtau / (dx * dx)) * laplacian


def burgers_substep(stepper: BurgersStepper, u: Field, dtau: float) -> Field:
    """One explicit centered step of size dtau (periodic wrap)."""
    if dtau < 0:
        raise NegativeTime(f"burgers_substep requires dtau >= 0, got {dtau}")
    bound = _cfl_bound(stepper, u.values)
    if dtau > bound * (1.0 + CFL_SLACK):
        raise CflViolation(f"dtau {dtau:.6e} exceeds stability bound {bound:.6e}")
    return Field(u.grid, _substep_values(stepper, u.values, dtau))


def burgers_substep_count(stepper: BurgersStepper, u: Field, t: float) -> int:
    """Number of equal substeps used to advance u by time t.

    The count is the smallest power of two with t / count below the stability
    bound of the starting field.  Power-of-two counts keep the substep size
    identical across runs whose outer steps form a dyadic ladder, so substep
    truncation error cancels in self-convergence differences.
    """
    if t <= 0:
        return 1
    bound = _cfl_bound(stepper, u.values)
    if stepper.dtau_cap is not None:
        bound = min(bound, stepper.dtau_cap)
    ratio = t / bound
    if ratio <= 1.0:
        return 1
    return 1 << max(0, math.ceil(math.log2(ratio) - 1e-12))


def burgers_flow(stepper: BurgersStepper, u: Field, t: float) -> Field:
    """Advance the Burgers sub-flow by time t with CFL-limited equal substeps.

    The substep size is frozen at the start of the call; each substep is
    still checked against the bound of the field it acts on.
    """
    if t < 0:
        raise NegativeTime(f"burgers_flow requires t >= 0, got {t}")
    if t == 0:
        return u
    count = burgers_substep_count(stepper, u, t)
    dtau = t / count
    values = u.values
    for _ in range(count):
        bound = _cfl_bound(stepper, values)
        if dtau > bound * (1.0 + CFL_SLACK):
            raise CflViolation(
                f"frozen substep {dtau:.6e} exceeds evolving stability bound {bound:.6e}"
            )
        values = _substep_values(stepper, values, dtau)
    return Field(u.grid, values)


def _adaptive_simpson(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n: int) -> float:
    s = np.linspace(lo, hi, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((hi - lo) / (n - 1) / 3.0 * np.sum(w * fn(s)))


def hopf_cole_oracle(
    w0: Callable[[np.ndarray], np.ndarray],
    epsilon: float,
    t: float,
    x: float,
    *,
    w0_primitive: Callable[[np.ndarray], np.ndarray] | None = None,
    tol: float = 1e-9,
    max_doublings: int = 16,
) -> float:
    """Exact viscous Burgers solution on the line at one space-time point.

    Evaluates the heat-kernel quotient

        w(t, x) = int ((x-y)/t) E(x, y) dy / int E(x, y) dy,
        E(x, y) = exp(-(x-y)^2 / (4 eps t) - W0(y) / (2 eps)),

    where W0 is the primitive of the initial profile from 0.  The y-integrals
    are refined by doubling composite Simpson until the output moves by less
    than tol; the primitive is computed by adaptive quadrature unless an
    analytic w0_primitive is supplied (much faster for sweeps).

    Raises QuadratureFailure when refinement does not converge.
    """
    if not t > 0:
        raise ValueError(f"oracle requires t > 0, got {t}")
    if not epsilon > 0:
        raise ValueError(f"oracle requires epsilon > 0, got {epsilon}")

    if w0_primitive is None:
        from scipy.integrate import quad

        cache: dict[float, float] = {}

        def primitive(ys: np.ndarray) -> np.ndarray:
            out = np.empty_like(ys)
            for i, y in enumerate(np.ravel(ys)):
                key = float(y)
                if key not in cache:
                    cache[key] = quad(w0, 0.0, key, limit=400)[0]
                out.flat[i] = cache[key]
            return out

    else:
        primitive = w0_primitive

    # window wide enough that the Gaussian factor beats the primitive modulation
    base = math.sqrt(4.0 * epsilon * t * math.log(1e40))
    probe = np.linspace(x - 2.0 * base, x + 2.0 * base, 65)
    w_bound = float(np.max(np.abs(primitive(probe))))
    radius = math.sqrt(4.0 * epsilon * t * (math.log(1e40) + w_bound / (2.0 * epsilon)))
    lo, hi = x - radius, x + radius

    def weight(y: np.ndarray) -> np.ndarray:
        expo = -((x - y) ** 2) / (4.0 * epsilon * t) - primitive(y) / (2.0 * epsilon)
        return np.exp(expo)

    previous = None
    n = 129
    for _ in range(max_doublings):
        den = _adaptive_simpson(weight, lo, hi, n)
        num = _adaptive_simpson(lambda y: (x - y) / t * weight(y), lo, hi, n)
        value = num / den
        if previous is not None and abs(value - previous) <= tol * (1.0 + abs(value)):
            return value
        previous = value
        n = 2 * n - 1
    raise QuadratureFailure(
        f"oracle did not converge to {tol:.1e} within {max_doublings} refinements"
    )
