"""Core value types: wave parameters, periodic grids, complex grid fields.

All spectral helpers (derivatives, shifts, norms) live here as free
functions of (values, grid) so the rest of the package can stay purely
functional.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "WaveParams",
    "Grid",
    "ComplexField",
    "ProfileKind",
    "spectral_derivative",
    "shift_and_gauge",
    "grid_trapezoid",
    "l2_norm",
    "h1_norm",
    "phase_matched_half_width",
]


@dataclass(frozen=True)
class WaveParams:
    """Parameter pair (sigma, c) of the endpoint solitary-wave family.

    The frequency omega is derived, always c**2/4; it is exposed as a
    property so it can never drift out of sync.
    """

    sigma: float
    c: float

    def __post_init__(self):
        if not (1.0 < self.sigma < 2.0):
            raise ValueError(
                f"sigma must lie strictly in (1, 2), got {self.sigma}: "
                "outside this range the profile leaves L^2 (sigma >= 2) "
                "or belongs to the plain-DNLS theory (sigma <= 1)"
            )
        if not self.c > 0:
            raise ValueError(f"wave speed c must be positive, got {self.c}")

    @property
    def omega(self) -> float:
        return 0.25 * self.c**2


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with N = 2**m points."""

    half_width: float
    n_points: int

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)


@dataclass(frozen=True)
class ComplexField:
    """Complex-valued grid function with value semantics.

    ``func``/``dfunc`` optionally carry the closed-form evaluator of the
    field and of its x-derivative; profile samples set them so that
    whole-line adaptive quadrature can see past the truncated box.
    Fields produced by arithmetic lose them.
    """

    grid: Grid
    values: np.ndarray
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )
    dfunc: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {v.shape} does not match grid size {self.grid.n_points}"
            )
        if not np.all(np.isfinite(v.view(float))):
            raise ValueError("field contains non-finite entries")
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "ComplexField":
        return ComplexField(self.grid, values)


class ProfileKind(Enum):
    AMPLITUDE = "amplitude"
    PHI = "phi"
    DX_PHI = "dx_phi"
    DC_PHI = "dc_phi"
    I_DX_PHI = "i_dx_phi"


def spectral_derivative(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    k = grid.wavenumbers
    return np.fft.ifft((1j * k) ** order * np.fft.fft(values))


def shift_and_gauge(values: np.ndarray, grid: Grid, theta: float, y: float) -> np.ndarray:
    """Return e^{i theta} v(. - y) via band-limited Fourier translation."""
    k = grid.wavenumbers
    return np.exp(1j * theta) * np.fft.ifft(np.exp(-1j * k * y) * np.fft.fft(values))


def grid_trapezoid(values: np.ndarray, grid: Grid):
    """Periodic trapezoid rule: h * sum over nodes."""
    return grid.spacing * np.sum(values)


def l2_norm(values: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.spacing * np.sum(np.abs(values) ** 2)))


def h1_norm(values: np.ndarray, grid: Grid) -> float:
    dv = spectral_derivative(values, grid)
    s = grid.spacing * (np.sum(np.abs(values) ** 2) + np.sum(np.abs(dv) ** 2))
    return float(np.sqrt(s))


def phase_matched_half_width(p: WaveParams, target: float) -> float:
    """Half-width L* near ``target`` with a 2*pi-periodic profile phase.

    The sampled soliton phase differs across the periodic seam by
    c*L - (2/sigma)*atan(sigma*c*L) mod 2*pi; choosing L* so this is an
    exact multiple of 2*pi removes the seam jump (the amplitude is even,
    hence already continuous) and restores spectral accuracy.
    """
    c, s = p.c, p.sigma

    def gap(length):
        return c * length - (2.0 / s) * np.arctan(s * c * length)

    k = max(1, round(gap(target) / (2.0 * np.pi)))
    length = target
    for _ in range(60):
        f = gap(length) - 2.0 * np.pi * k
        df = c - 2.0 * c / (1.0 + (s * c * length) ** 2)
        step = f / df
        length -= step
        if abs(step) < 1e-14 * max(1.0, abs(length)):
            break
    if length <= 0:
        raise ValueError("no positive phase-matched half-width near target")
    return float(length)
