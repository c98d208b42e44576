"""Closed-form profile family unit tests."""

import numpy as np
import pytest

from gdnlslab.core import Grid, ProfileKind, WaveParams, phase_matched_half_width
from gdnlslab import profiles as pr

P = WaveParams(sigma=1.5, c=1.0)


def _grid(p, target=200.0, n=8192):
    return Grid(phase_matched_half_width(p, target), n)


def test_amplitude_closed_form_at_origin():
    s, c = P.sigma, P.c
    assert pr.varphi(P, 0.0) == pytest.approx((2 * c * (s + 1)) ** (1 / (2 * s)))
    # even, decreasing away from the origin
    x = np.linspace(0.0, 50.0, 200)
    v = pr.varphi(P, x)
    assert np.all(np.diff(v) < 0)
    assert pr.varphi(P, -3.0) == pr.varphi(P, 3.0)


def test_amplitude_algebraic_decay_rate():
    # varphi ~ (sigma c x)^(-1/sigma) * (2c(sigma+1))^(1/(2 sigma))
    s, c = P.sigma, P.c
    x = 1e8
    pred = (2 * c * (s + 1)) ** (1 / (2 * s)) * (s * c * x) ** (-1 / s)
    assert pr.varphi(P, x) == pytest.approx(pred, rel=1e-12)


def test_overflow_safety_at_extreme_arguments():
    for x in (1e150, 1e300, -1e300):
        for f in (
            pr.varphi,
            pr.dx_varphi,
            pr.dxx_varphi,
            pr.dc_varphi,
            pr.dx_phase,
            pr.dc_phase,
        ):
            assert np.isfinite(f(P, x))
    assert pr.varphi(P, 1e300) >= 0.0


def test_x_derivatives_match_central_differences():
    rng = np.random.default_rng(11)
    xs = rng.uniform(-30.0, 30.0, 12)
    h = 1e-5
    for x in xs:
        fd = (pr.varphi(P, x + h) - pr.varphi(P, x - h)) / (2 * h)
        assert pr.dx_varphi(P, x) == pytest.approx(fd, abs=1e-8)
        fd2 = (pr.varphi(P, x + h) - 2 * pr.varphi(P, x) + pr.varphi(P, x - h)) / h**2
        assert pr.dxx_varphi(P, x) == pytest.approx(fd2, abs=1e-5)
        fd = (pr.phase(P, x + h) - pr.phase(P, x - h)) / (2 * h)
        assert pr.dx_phase(P, x) == pytest.approx(fd, abs=1e-8)


def test_c_derivatives_match_central_differences():
    rng = np.random.default_rng(13)
    xs = rng.uniform(-30.0, 30.0, 8)
    dc = 1e-6
    pp = WaveParams(P.sigma, P.c + dc)
    pm = WaveParams(P.sigma, P.c - dc)
    for x in xs:
        fd = (pr.varphi(pp, x) - pr.varphi(pm, x)) / (2 * dc)
        assert pr.dc_varphi(P, x) == pytest.approx(fd, abs=1e-7)
        fd = (pr.phase(pp, x) - pr.phase(pm, x)) / (2 * dc)
        assert pr.dc_phase(P, x) == pytest.approx(fd, abs=1e-6)


def test_complex_profile_assembles_from_amplitude_and_phase():
    x = np.linspace(-20.0, 20.0, 101)
    lhs = pr.phi(P, x)
    rhs = pr.varphi(P, x) * np.exp(1j * pr.phase(P, x))
    assert np.max(np.abs(lhs - rhs)) < 1e-14
    fd = (pr.phi(P, x + 1e-6) - pr.phi(P, x - 1e-6)) / 2e-6
    assert np.max(np.abs(pr.dx_phi(P, x) - fd)) < 1e-7


def test_sample_kinds_consistent():
    g = _grid(P, 50.0, 1024)
    phi = pr.sample(P, g, ProfileKind.PHI)
    amp = pr.sample(P, g, ProfileKind.AMPLITUDE)
    idx = pr.sample(P, g, ProfileKind.I_DX_PHI)
    dx = pr.sample(P, g, ProfileKind.DX_PHI)
    assert np.max(np.abs(np.abs(phi.values) - amp.values.real)) < 1e-12
    assert np.max(np.abs(idx.values - 1j * dx.values)) < 1e-14
    assert phi.func is not None and phi.dfunc is not None


def test_residuals_small_at_base_point():
    g = _grid(P)
    res = pr.profile_residuals(P, g)
    assert set(res) == {"amplitude_equation", "complex_equation"}
    assert res["amplitude_equation"] < 1e-7
    assert res["complex_equation"] < 1e-7


def test_residuals_detect_wrong_speed():
    # the c=1 profile is not a steady state of the c=1.1 operator
    from gdnlslab.core import spectral_derivative

    g = _grid(P)
    wrong = WaveParams(P.sigma, 1.1)
    u = pr.phi(P, g.nodes) * pr.interior_window(g)
    ux = spectral_derivative(u, g)
    uxx = spectral_derivative(u, g, order=2)
    s = wrong.sigma
    r = -uxx + wrong.omega * u + wrong.c * 1j * ux - 1j * np.abs(u) ** (2 * s) * ux
    interior = np.abs(g.nodes) <= g.half_width / 2
    assert np.max(np.abs(r[interior])) > 1e-2


def test_envelope_check_bounds_decay():
    g = _grid(P, 100.0, 4096)
    amp = pr.sample(P, g, ProfileKind.AMPLITUDE)
    s, c = P.sigma, P.c
    peak = (2 * c * (s + 1)) ** (1 / (2 * s))
    tail = peak * (s * c) ** (-1 / s)
    # sup over nodes of |varphi| * (1+x^2)^{1/(2 sigma)}
    weighted = pr.envelope_check(amp, -1.0 / s)
    assert tail * 0.99 <= weighted <= max(peak, tail) * 1.01
