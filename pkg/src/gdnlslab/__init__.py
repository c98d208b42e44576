"""Numerical laboratory for endpoint solitary waves of gDNLS.

The package evaluates the explicit two-parameter family of solitary
waves of the generalized derivative nonlinear Schroedinger equation at
the stability-threshold wave speed, verifies the scalar identities and
quadratic-form signs that govern their (in)stability, constructs the
localized direction along which the action decreases, and runs the
pseudo-spectral evolution experiment that exhibits departure from the
solitary-wave orbit.
"""

from .core import (
    ComplexField,
    Grid,
    ProfileKind,
    WaveParams,
    phase_matched_half_width,
)
from .quadrature import QuadratureMethod, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "ComplexField",
    "Grid",
    "ProfileKind",
    "WaveParams",
    "phase_matched_half_width",
    "QuadratureMethod",
    "QuadratureSpec",
    "__version__",
]
