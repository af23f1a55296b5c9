"""Periodic grid, DFT conventions, and discrete L2 / Sobolev norms.

Conventions: the domain is [0, length) sampled at n_nodes equispaced points,
the forward transform is the plain (unnormalized) DFT

    coeff[k] = sum_j values[j] * exp(-2i*pi*j*k/N),

and bin k carries the physical frequency k/length with k signed in
-N/2 .. N/2-1 (standard FFT bin order).  The Nyquist bin k = -N/2 is a
cosine-only mode: multiplier builders keep it real so that real fields map
to real fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianInput

__all__ = [
    "SpectralGrid",
    "Field",
    "SpectralField",
    "forward_dft",
    "inverse_dft",
    "l2_norm",
    "hs_norm",
    "apply_fourier_multiplier",
    "force_real_nyquist",
]

#: relative imaginary residue accepted when casting an inverse transform to a real field
IMAG_RESIDUE_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on [0, length) with a power-of-two node count."""

    n_nodes: int
    length: float = 1.0

    def __post_init__(self) -> None:
        n = self.n_nodes
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n_nodes must be a power of two >= 16, got {n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be a positive real, got {self.length}")
        object.__setattr__(self, "dx", self.length / n)
        nodes = np.arange(n) * (self.length / n)
        freqs = np.fft.fftfreq(n, d=self.length / n)
        nodes.flags.writeable = False
        freqs.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def nyquist_index(self) -> int:
        return self.n_nodes // 2


def _as_locked_array(values, dtype, n: int) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    if arr.size != n:
        raise ValueError(f"expected {n} values, got {arr.size}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Field:
    """Real nodal values of the unknown on a grid at a single time."""

    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_locked_array(self.values, np.float64, self.grid.n_nodes)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite reals")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class SpectralField:
    """DFT coefficients in FFT bin order."""

    grid: SpectralGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_locked_array(self.coeffs, np.complex128, self.grid.n_nodes)
        object.__setattr__(self, "coeffs", arr)


def forward_dft(f: Field) -> SpectralField:
    """Unnormalized forward DFT of a real field."""
    return SpectralField(f.grid, np.fft.fft(f.values))


def inverse_dft(spectrum: SpectralField) -> Field:
    """Inverse DFT, discarding a small imaginary residue.

    Raises NonHermitianInput when the residue exceeds IMAG_RESIDUE_RTOL
    relative to the field's L2 size, i.e. when the coefficients do not
    represent a real field.
    """
    z = np.fft.ifft(spectrum.coeffs)
    total = float(np.sqrt(np.sum(np.abs(z) ** 2)))
    residue = float(np.sqrt(np.sum(z.imag**2)))
    if residue > IMAG_RESIDUE_RTOL * total:
        raise NonHermitianInput(
            f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_RTOL:.1e} * |field| = "
            f"{IMAG_RESIDUE_RTOL * total:.3e}"
        )
    return Field(spectrum.grid, z.real)


def l2_norm(f: Field) -> float:
    """Midpoint-rule discrete L2 norm, sqrt(dx * sum u_j^2)."""
    return float(np.sqrt(f.grid.dx * np.sum(f.values**2)))


def hs_norm(f: Field, s: float) -> float:
    """Discrete Sobolev norm of order s.

    Normalized so that hs_norm(f, 0) equals l2_norm(f) exactly (Parseval):
    sqrt(length / N^2 * sum_k (1 + xi_k^2)^s |coeff_k|^2).
    """
    grid = f.grid
    coeffs = np.fft.fft(f.values)
    weights = (1.0 + grid.frequencies**2) ** s
    return float(np.sqrt(grid.length / grid.n_nodes**2 * np.sum(weights * np.abs(coeffs) ** 2)))


def force_real_nyquist(grid: SpectralGrid, multiplier: np.ndarray) -> np.ndarray:
    """Return a copy of a bin-ordered multiplier with a real Nyquist entry.

    Keeping the Nyquist multiplier real preserves real fields and makes
    multiplier composition exact at that bin.
    """
    out = np.array(multiplier, dtype=np.complex128, copy=True)
    k = grid.nyquist_index
    out[k] = out[k].real
    return out


def apply_fourier_multiplier(f: Field, multiplier: np.ndarray) -> Field:
    """Pointwise multiply the spectrum of f by a bin-ordered multiplier."""
    spectrum = np.fft.fft(f.values) * multiplier
    return inverse_dft(SpectralField(f.grid, spectrum))
