"""Conserved functionals, the action, and the family's closed-form values.

Conventions (all inner products are the real L^2 pairing):

    mass      M(u) = (1/2) ||u||^2
    momentum  P(u) = (1/2) Im int u conj(u_x)
    nonlinear N(u) = Im int |u|^{2 sigma} u conj(u_x)
    energy    E(u) = (1/2) ||u_x||^2 - N(u) / (2 sigma + 2)
    action    S(u) = E(u) + c P(u) + (c^2/4) M(u)
    Nehari    K(u) = Q(u) - N(u),
              Q(u) = ||u_x||^2 + 2 c P(u) + (c^2/4) ||u||^2

Each functional of a grid field has two evaluation routes: periodic
trapezoid with spectral derivatives, or whole-line adaptive quadrature
of the field's closed form when it carries one.  The soliton_* helpers
give the family's exact values; everything reduces to the single model
integral a_sigma.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .core import ComplexField, grid_trapezoid, spectral_derivative
from .quadrature import QuadratureMethod, QuadratureSpec, integrate_real_line
from .core import WaveParams

__all__ = [
    "a_sigma",
    "mass",
    "momentum",
    "kinetic",
    "nonlinear",
    "energy",
    "action",
    "nehari",
    "gradient_action",
    "soliton_mass",
    "soliton_momentum",
    "soliton_kinetic",
    "soliton_nonlinear",
    "soliton_energy",
    "soliton_action",
    "dc_soliton_mass",
    "dc_soliton_momentum",
    "power_norm",
    "soliton_power_norm",
    "identity_suite",
    "rescale_to_nehari",
]


def a_sigma(sigma: float, rel_tol: float = 1e-12) -> float:
    """Model integral int (1 + y^2)^(-1/sigma) dy over the real line.

    Finite exactly when sigma < 2; every member of the soliton family
    has mass proportional to this number.
    """
    if not (0.0 < sigma < 2.0):
        raise ValueError(f"a_sigma requires 0 < sigma < 2, got {sigma}")

    def f(y):
        t = (y * y) if abs(y) < 1e150 else np.inf
        return (1.0 + t) ** (-1.0 / sigma) if np.isfinite(t) else 0.0

    return integrate_real_line(f, rel_tol=rel_tol)


def b_sigma(sigma: float, rel_tol: float = 1e-12) -> float:
    """Model integral int (1 + y^2)^(-1/sigma - 1) dy over the real line.

    Related to ``a_sigma`` by B = (1 - sigma/2) A, which the identity
    suite checks against adaptive quadrature.
    """
    if not (0.0 < sigma < 2.0):
        raise ValueError(f"b_sigma requires 0 < sigma < 2, got {sigma}")

    def f(y):
        t = (y * y) if abs(y) < 1e150 else np.inf
        return (1.0 + t) ** (-1.0 / sigma - 1.0) if np.isfinite(t) else 0.0

    return integrate_real_line(f, rel_tol=rel_tol)


# -- pointwise integrands ----------------------------------------------------


def _density(u: ComplexField, name: str) -> Callable[[float], float]:
    """Real whole-line density of one functional of a closed-form field."""
    if u.func is None or u.dfunc is None:
        raise ValueError(
            "adaptive quadrature needs a field with closed-form func/dfunc"
        )
    f, df = u.func, u.dfunc
    if name == "mass":
        return lambda x: 0.5 * float(np.abs(f(x)) ** 2)
    if name == "momentum":
        return lambda x: 0.5 * float(np.imag(f(x) * np.conj(df(x))))
    if name == "kinetic":
        return lambda x: float(np.abs(df(x)) ** 2)
    raise ValueError(f"unknown density {name!r}")


def _eval(u: ComplexField, spec: QuadratureSpec, name: str, sigma: float = 0.0):
    if spec.method is QuadratureMethod.GRID_TRAPEZOID:
        v = u.values
        g = u.grid
        if name == "mass":
            return 0.5 * float(np.real(grid_trapezoid(np.abs(v) ** 2, g)))
        dv = spectral_derivative(v, g)
        if name == "momentum":
            return 0.5 * float(np.real(grid_trapezoid(np.imag(v * np.conj(dv)), g)))
        if name == "kinetic":
            return float(np.real(grid_trapezoid(np.abs(dv) ** 2, g)))
        if name == "nonlinear":
            dens = np.abs(v) ** (2.0 * sigma) * np.imag(v * np.conj(dv))
            return float(np.real(grid_trapezoid(dens, g)))
        raise ValueError(f"unknown functional {name!r}")
    if name == "nonlinear":
        f, df = u.func, u.dfunc
        if f is None or df is None:
            raise ValueError(
                "adaptive quadrature needs a field with closed-form func/dfunc"
            )

        def dens(x):
            fx = f(x)
            return float(np.abs(fx) ** (2.0 * sigma) * np.imag(fx * np.conj(df(x))))

        return integrate_real_line(dens, rel_tol=spec.rel_tol)
    return integrate_real_line(_density(u, name), rel_tol=spec.rel_tol)


def mass(u: ComplexField, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return _eval(u, spec, "mass")


def momentum(u: ComplexField, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return _eval(u, spec, "momentum")


def kinetic(u: ComplexField, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """||u_x||^2 (no 1/2)."""
    return _eval(u, spec, "kinetic")


def nonlinear(u: ComplexField, sigma: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """N(u) = Im int |u|^{2 sigma} u conj(u_x)."""
    return _eval(u, spec, "nonlinear", sigma=sigma)


def energy(u: ComplexField, sigma: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return 0.5 * kinetic(u, spec) - nonlinear(u, sigma, spec) / (2.0 * sigma + 2.0)


def action(u: ComplexField, p: WaveParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return (
        energy(u, p.sigma, spec)
        + p.c * momentum(u, spec)
        + p.omega * mass(u, spec)
    )


def nehari(u: ComplexField, p: WaveParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """K(u) = Q(u) - N(u); zero on the solitary-wave family."""
    q = kinetic(u, spec) + 2.0 * p.c * momentum(u, spec) + 2.0 * p.omega * mass(u, spec)
    return q - nonlinear(u, p.sigma, spec)


def gradient_action(u: ComplexField, p: WaveParams) -> np.ndarray:
    """L^2 gradient S'(u) = -u_xx + (c^2/4) u + i c u_x - i |u|^{2 sigma} u_x.

    Spectral derivatives; the solitary wave is exactly its zero set.
    """
    g = u.grid
    ux = spectral_derivative(u.values, g)
    uxx = spectral_derivative(u.values, g, order=2)
    amp = np.abs(u.values) ** (2.0 * p.sigma)
    return -uxx + p.omega * u.values + 1j * p.c * ux - 1j * amp * ux


# -- closed-form values on the family ----------------------------------------


def soliton_mass(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """M(phi_c) = (2 sigma + 2)^{1/sigma} c^{1/sigma - 1} a_sigma / (2 sigma)."""
    s, c = p.sigma, p.c
    return (
        0.5 / s * (2.0 * s + 2.0) ** (1.0 / s) * c ** (1.0 / s - 1.0) * a_sigma(s, rel_tol)
    )


def soliton_momentum(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """P(phi_c) = (c/2)(1 - sigma) M(phi_c); negative throughout the range."""
    return 0.5 * p.c * (1.0 - p.sigma) * soliton_mass(p, rel_tol)


def soliton_kinetic(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """||dx phi_c||^2 = c^2 M(phi_c) / 2 (equipartition at the endpoint)."""
    return 0.5 * p.c**2 * soliton_mass(p, rel_tol)


def soliton_nonlinear(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """N(phi_c) = c^2 M + 2 c P = (2 - sigma) c^2 M; the Nehari value is 0."""
    return (2.0 - p.sigma) * p.c**2 * soliton_mass(p, rel_tol)


def soliton_energy(p: WaveParams, rel_tol: float = 1e-12) -> float:
    s = p.sigma
    m = soliton_mass(p, rel_tol)
    return 0.25 * p.c**2 * m - (2.0 - s) * p.c**2 * m / (2.0 * s + 2.0)


def soliton_action(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """S(phi_c) = sigma (2 - sigma) c^2 M / (2 sigma + 2)."""
    s = p.sigma
    return s * (2.0 - s) * p.c**2 * soliton_mass(p, rel_tol) / (2.0 * s + 2.0)


def soliton_power_norm(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """int phi_c^{2 sigma + 2} = 2 c (sigma + 1)(2 - sigma) M."""
    return 2.0 * p.c * (p.sigma + 1.0) * (2.0 - p.sigma) * soliton_mass(p, rel_tol)


def power_norm(u: ComplexField, sigma: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """int |u|^{2 sigma + 2}."""
    if spec.method is QuadratureMethod.GRID_TRAPEZOID:
        return float(
            np.real(grid_trapezoid(np.abs(u.values) ** (2.0 * sigma + 2.0), u.grid))
        )
    f = u.func
    if f is None:
        raise ValueError("adaptive quadrature needs a field with closed-form func")
    return integrate_real_line(
        lambda x: float(np.abs(f(x)) ** (2.0 * sigma + 2.0)), rel_tol=spec.rel_tol
    )


def dc_soliton_mass(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """d/dc M(phi_c) = (1/sigma - 1) M / c; strictly negative here."""
    return (1.0 / p.sigma - 1.0) * soliton_mass(p, rel_tol) / p.c


def dc_soliton_momentum(p: WaveParams, rel_tol: float = 1e-12) -> float:
    """d/dc P(phi_c) = (1 - sigma) M / (2 sigma)."""
    return (1.0 - p.sigma) * soliton_mass(p, rel_tol) / (2.0 * p.sigma)


# -- cross-checks -------------------------------------------------------------


def _central_difference(fun: Callable[[float], float], c: float, delta: float) -> float:
    return (fun(c + delta) - fun(c - delta)) / (2.0 * delta)


def identity_suite(p: WaveParams, rel_tol: float = 1e-11) -> dict:
    """Check every closed-form family identity against direct quadrature.

    Left sides integrate the sampled profile's pointwise densities over
    the whole line; right sides come from the scalar formulas above
    (which reduce to the single model integral a_sigma).  c-derivatives
    are additionally checked by central differences in c.  Returns
    {name: (lhs, rhs, rel_err)}.
    """
    from . import profiles as pr

    spec_tol = rel_tol

    def pair(name, lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1e-30)
        return name, (lhs, rhs, abs(lhs - rhs) / scale)

    def q(dens):
        return integrate_real_line(dens, rel_tol=spec_tol)

    s, c = p.sigma, p.c
    f = lambda x: pr.varphi(p, x)
    fx = lambda x: pr.dx_varphi(p, x)
    tx = lambda x: pr.dx_phase(p, x)
    fc = lambda x: pr.dc_varphi(p, x)
    tc = lambda x: pr.dc_phase(p, x)

    out = dict(
        [
            pair("mass", q(lambda x: 0.5 * f(x) ** 2), soliton_mass(p)),
            pair(
                "momentum",
                q(lambda x: -0.5 * tx(x) * f(x) ** 2),
                soliton_momentum(p),
            ),
            pair(
                "kinetic",
                q(lambda x: fx(x) ** 2 + (tx(x) * f(x)) ** 2),
                soliton_kinetic(p),
            ),
            pair(
                "nonlinear",
                q(lambda x: -f(x) ** (2.0 * s + 2.0) * tx(x)),
                soliton_nonlinear(p),
            ),
            pair(
                "power_norm",
                q(lambda x: f(x) ** (2.0 * s + 2.0)),
                soliton_power_norm(p),
            ),
            pair(
                "dc_mass",
                q(lambda x: f(x) * fc(x)),
                dc_soliton_mass(p),
            ),
            pair(
                "dc_mass_fd",
                _central_difference(
                    lambda cc: soliton_mass(WaveParams(s, cc)), c, 1e-5 * c
                ),
                dc_soliton_mass(p),
            ),
            pair(
                "dc_momentum",
                q(
                    lambda x: -tx(x) * f(x) * fc(x)
                    - 0.5 * pr.dx_dc_phase(p, x) * f(x) ** 2
                ),
                dc_soliton_momentum(p),
            ),
            pair(
                "dc_momentum_fd",
                _central_difference(
                    lambda cc: soliton_momentum(WaveParams(s, cc)), c, 1e-5 * c
                ),
                dc_soliton_momentum(p),
            ),
        ]
    )

    # Relations between the functionals: quadrature on the left, the
    # closed-form combination on the right.
    m_val = q(lambda x: 0.5 * f(x) ** 2)
    out.update(
        [
            pair("model_b", b_sigma(s), (1.0 - 0.5 * s) * a_sigma(s)),
            pair(
                "momentum_mass",
                q(lambda x: -0.5 * tx(x) * f(x) ** 2),
                0.5 * c * (1.0 - s) * m_val,
            ),
            pair(
                "power_mass",
                q(lambda x: f(x) ** (2.0 * s + 2.0)),
                2.0 * c * (s + 1.0) * (2.0 - s) * m_val,
            ),
            pair(
                "gradient_mass",
                q(lambda x: fx(x) ** 2 + (tx(x) * f(x)) ** 2),
                0.5 * c * c * m_val,
            ),
            pair(
                "drift_mass_momentum",
                q(lambda x: -tx(x) * f(x) ** (2.0 * s + 2.0)),
                c * c * m_val + 2.0 * c * soliton_momentum(p),
            ),
            pair(
                "mass_dc_mass",
                m_val,
                c * s / (1.0 - s) * q(lambda x: f(x) * fc(x)),
            ),
        ]
    )
    return out


def rescale_to_nehari(
    u: ComplexField, p: WaveParams, spec: QuadratureSpec = QuadratureSpec()
):
    """Scaling lam > 0 with K(lam * u) = 0, i.e. lam^{2 sigma} = Q/N.

    Returns (lam, lam * u).  Raises ValueError when N(u) <= 0 (no
    positive rescaling reaches the zero set of K) or Q(u) <= 0.
    """
    q_val = (
        kinetic(u, spec) + 2.0 * p.c * momentum(u, spec) + 2.0 * p.omega * mass(u, spec)
    )
    n_val = nonlinear(u, p.sigma, spec)
    if n_val <= 0.0 or q_val <= 0.0:
        raise ValueError(
            f"no Nehari rescaling: quadratic part {q_val!r}, nonlinear part {n_val!r}"
        )
    from scipy.optimize import brentq

    target = (q_val / n_val) ** (1.0 / (2.0 * p.sigma))
    lo, hi = 0.5 * target, 2.0 * target
    lam = float(
        brentq(
            lambda s: q_val - s ** (2.0 * p.sigma) * n_val,
            lo,
            hi,
            xtol=1e-14,
            rtol=8.9e-16,
        )
    )
    return lam, ComplexField(u.grid, lam * u.values)
