"""Construction of the cutoff negative direction of the action.

At the endpoint speed the usual variational direction (the c-derivative
of the profile) is not square integrable near infinity in the relevant
weighted sense, so it enters only through a smooth cutoff chi_R.  The
direction is

    psi = phi + mu * chi_R * dc_phi + nu * i * dx_phi,

with (mu, nu) solving the exact 2x2 linear system that enforces the two
orthogonality constraints

    <psi, phi> = 0   and   <psi, i dx_phi> = 0.

Both matrix entries and the residual checks are whole-line adaptive
integrals of closed forms, so the constraints hold to quadrature
accuracy rather than grid accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import functionals as fn
from . import profiles as pr
from .core import ComplexField, Grid, WaveParams
from .quadrature import integrate_real_line

__all__ = [
    "cutoff_value",
    "cutoff_dx",
    "cutoff_dxx",
    "solve_mu_nu",
    "NegativeDirection",
    "build_psi",
    "orthogonality_residuals",
    "beta_scan",
    "fit_rates",
]


def _bump_pieces(t: np.ndarray):
    """a = h(2-t), b = h(t-1) with h(s) = exp(-1/s), plus first ratios.

    Valid on 1 < t < 2.  Outside that strip the cutoff is exactly 0 or 1
    and all derivatives vanish; callers mask accordingly.
    """
    s2 = 2.0 - t
    s1 = t - 1.0
    a = np.exp(-1.0 / s2)
    b = np.exp(-1.0 / s1)
    da = -a / s2**2
    db = b / s1**2
    d2a = a / s2**4 - 2.0 * a / s2**3
    d2b = b / s1**4 - 2.0 * b / s1**3
    return a, b, da, db, d2a, d2b


def _chi(t: np.ndarray):
    """chi(t) = h(2-t) / (h(2-t) + h(t-1)) on t >= 0, with chi', chi''."""
    t = np.asarray(t, dtype=float)
    val = np.where(t <= 1.0, 1.0, 0.0)
    dval = np.zeros_like(t)
    d2val = np.zeros_like(t)
    mid = (t > 1.0) & (t < 2.0)
    if np.any(mid):
        a, b, da, db, d2a, d2b = _bump_pieces(t[mid])
        w = a + b
        dw = da + db
        num = da * b - a * db
        val[mid] = a / w
        dval[mid] = num / w**2
        d2val[mid] = (d2a * b - a * d2b) / w**2 - 2.0 * dw * num / w**3
    return val, dval, d2val


def cutoff_value(x, R: float) -> np.ndarray:
    """Even C^infinity cutoff: 1 on |x| <= R, 0 on |x| >= 2R."""
    return _chi(np.abs(np.asarray(x, dtype=float)) / R)[0]


def cutoff_dx(x, R: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return _chi(np.abs(x) / R)[1] * np.sign(x) / R


def cutoff_dxx(x, R: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return _chi(np.abs(x) / R)[2] / R**2


def solve_mu_nu(p: WaveParams, R: float, rel_tol: float = 1e-11) -> dict:
    """Coefficients (mu, nu) of the cutoff negative direction.

    The orthogonality constraints reduce to

        [ m_R    2P      ] [mu]   [-2M]
        [ w_R    c^2 M/2 ] [nu] = [-2P]

    where m_R = int chi_R * varphi * dc_varphi (the cutoff mass
    pairing) and w_R is the cutoff pairing of i dx_phi with dc_phi.
    Returns mu, nu, the matrix entries, and the auxiliary diagnostics
    m_R - dM/dc, w_R - dP/dc, p_R - dP/dc (p_R is the cutoff integral of
    the c-derivative of the momentum density; all three deviations decay
    like R^(1 - 2/sigma)).
    """
    s, c = p.sigma, p.c
    bps = [-2.0 * R, -R, R, 2.0 * R]

    def q(dens):
        return integrate_real_line(dens, rel_tol=rel_tol, breakpoints=bps)

    m_r = q(lambda x: float(cutoff_value(x, R) * pr.varphi(p, x) * pr.dc_varphi(p, x)))
    w_r = q(
        lambda x: float(
            cutoff_value(x, R)
            * (
                pr.dx_varphi(p, x) * pr.dc_phase(p, x) * pr.varphi(p, x)
                - pr.dx_phase(p, x) * pr.varphi(p, x) * pr.dc_varphi(p, x)
            )
        )
    )
    p_r = q(
        lambda x: float(
            cutoff_value(x, R)
            * (
                -pr.dx_phase(p, x) * pr.varphi(p, x) * pr.dc_varphi(p, x)
                - 0.5 * pr.dx_dc_phase(p, x) * pr.varphi(p, x) ** 2
            )
        )
    )

    m = fn.soliton_mass(p)
    mom = fn.soliton_momentum(p)
    mat = np.array([[m_r, 2.0 * mom], [w_r, 0.5 * c**2 * m]])
    rhs = np.array([-2.0 * m, -2.0 * mom])
    det = np.linalg.det(mat)
    if abs(det) < 1e-8 * max(abs(m_r) * c**2 * m, abs(mom * w_r), 1e-30):
        raise RuntimeError(
            f"orthogonality system nearly singular at R={R}: det={det!r}"
        )
    mu, nu = np.linalg.solve(mat, rhs)
    return {
        "mu": float(mu),
        "nu": float(nu),
        "m_R": m_r,
        "w_R": w_r,
        "p_R": p_r,
        "det": float(det),
        "dev_mass": abs(m_r - fn.dc_soliton_mass(p)),
        "dev_momentum": abs(p_r - fn.dc_soliton_momentum(p)),
        "dev_pairing": abs(w_r - fn.dc_soliton_momentum(p)),
    }


@dataclass(frozen=True)
class NegativeDirection:
    params: WaveParams
    cutoff_radius: float
    mu: float
    nu: float
    psi: ComplexField
    quad_form_value: float


def build_psi(p: WaveParams, R: float, grid: Grid, rel_tol: float = 1e-11) -> NegativeDirection:
    """Assemble psi on the grid and evaluate <S'' psi, psi>.

    The grid must contain the cutoff support with margin (L >= 4R) so
    the spectral quadratic form sees the whole direction.
    """
    from .linearization import quad_form

    if grid.half_width < 4.0 * R:
        raise ValueError(
            f"grid half-width {grid.half_width} too small for cutoff radius {R}; need >= {4.0 * R}"
        )
    sol = solve_mu_nu(p, R, rel_tol)
    mu, nu = sol["mu"], sol["nu"]

    def f(x):
        return (
            pr.phi(p, x)
            + mu * cutoff_value(x, R) * pr.dc_phi(p, x)
            + nu * 1j * pr.dx_phi(p, x)
        )

    def df(x):
        return (
            pr.dx_phi(p, x)
            + mu
            * (
                cutoff_dx(x, R) * pr.dc_phi(p, x)
                + cutoff_value(x, R) * pr.dx_dc_phi(p, x)
            )
            + nu * 1j * pr.dxx_phi(p, x)
        )

    psi = ComplexField(grid, f(grid.nodes), func=f, dfunc=df)
    value = quad_form(psi, psi, p)
    return NegativeDirection(p, R, mu, nu, psi, value)


def orthogonality_residuals(nd: NegativeDirection, rel_tol: float = 1e-11) -> dict:
    """Whole-line residuals of the two constraints, relative to the mass.

    Uses the closed-form densities Re(conj(phi) psi) and
    Re(conj(i dx_phi) psi), independent of the grid.
    """
    p, R, mu, nu = nd.params, nd.cutoff_radius, nd.mu, nd.nu
    bps = [-2.0 * R, -R, R, 2.0 * R]

    def q(dens):
        return integrate_real_line(dens, rel_tol=rel_tol, breakpoints=bps)

    def mass_row(x):
        f = pr.varphi(p, x)
        return float(
            f**2
            + mu * cutoff_value(x, R) * f * pr.dc_varphi(p, x)
            - nu * pr.dx_phase(p, x) * f**2
        )

    def momentum_row(x):
        f = pr.varphi(p, x)
        fx = pr.dx_varphi(p, x)
        tx = pr.dx_phase(p, x)
        return float(
            -tx * f**2
            + mu
            * cutoff_value(x, R)
            * (fx * pr.dc_phase(p, x) * f - tx * f * pr.dc_varphi(p, x))
            + nu * (fx**2 + (tx * f) ** 2)
        )

    scale = 2.0 * fn.soliton_mass(p)
    return {
        "mass_orthogonality": abs(q(mass_row)) / scale,
        "momentum_orthogonality": abs(q(momentum_row)) / scale,
    }


def beta_scan(p: WaveParams, nd: NegativeDirection, betas, rel_tol: float = 1e-11) -> list:
    """Action gaps S(phi + beta psi) - S(phi) along the direction.

    Grid evaluation (trapezoid + spectral derivatives): both fields
    share the algebraic tail phase, so the gap's tail error cancels to
    well below the gap itself.  Returns a list of (beta, gap) pairs; a
    negative direction makes the gap negative for small beta != 0.
    """
    from .functionals import action
    from .quadrature import QuadratureMethod, QuadratureSpec

    spec = QuadratureSpec(method=QuadratureMethod.GRID_TRAPEZOID)
    g = nd.psi.grid
    phi_f = pr.sample(p, g, pr.ProfileKind.PHI)
    base = action(phi_f, p, spec)
    out = []
    for beta in betas:
        u = ComplexField(g, phi_f.values + beta * nd.psi.values)
        out.append((float(beta), action(u, p, spec) - base))
    return out


def fit_rates(p: WaveParams, radii, rel_tol: float = 1e-10) -> dict:
    """Log-log decay-rate fits of the cutoff deviations in R.

    Fits the slopes of |m_R - dM/dc| and |p_R - dP/dc| against R; both
    should approach 1 - 2/sigma as R grows.  Returns the data and the
    fitted slopes.  (The truncated quadratic-form tail is not fitted:
    its integrand is a small difference of terms growing like
    R^{3-2/sigma}, which adaptive quadrature cannot resolve for small
    sigma.)
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 3:
        raise ValueError("need at least three radii for a rate fit")
    dev_mass, dev_mom = [], []
    for r in radii:
        sol = solve_mu_nu(p, r, rel_tol)
        dev_mass.append(sol["dev_mass"])
        dev_mom.append(sol["dev_momentum"])
    lr = np.log(radii)

    def slope(vals):
        return float(np.polyfit(lr, np.log(vals), 1)[0])

    return {
        "radii": radii,
        "dev_mass": dev_mass,
        "dev_momentum": dev_mom,
        "slope_mass": slope(dev_mass),
        "slope_momentum": slope(dev_mom),
        "predicted_slope": 1.0 - 2.0 / p.sigma,
    }
