"""Grid, field, and spectral-helper unit tests."""

import numpy as np
import pytest

from gdnlslab.core import (
    ComplexField,
    Grid,
    WaveParams,
    grid_trapezoid,
    h1_norm,
    l2_norm,
    phase_matched_half_width,
    shift_and_gauge,
    spectral_derivative,
)


def test_wave_params_validation():
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        WaveParams(sigma=2.0, c=1.0)
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        WaveParams(sigma=1.0, c=1.0)
    with pytest.raises(ValueError, match="positive"):
        WaveParams(sigma=1.5, c=0.0)


def test_omega_is_quarter_c_squared():
    p = WaveParams(sigma=1.5, c=3.0)
    assert p.omega == 2.25


def test_grid_nodes_and_spacing():
    g = Grid(half_width=10.0, n_points=64)
    assert g.spacing == 20.0 / 64
    x = g.nodes
    assert x.shape == (64,)
    assert x[0] == -10.0
    assert np.allclose(np.diff(x), g.spacing)
    # right endpoint excluded: the grid is periodic
    assert x[-1] == pytest.approx(10.0 - g.spacing)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError, match="power of two"):
        Grid(half_width=10.0, n_points=100)
    with pytest.raises(ValueError, match="power of two"):
        Grid(half_width=10.0, n_points=8)
    with pytest.raises(ValueError, match="positive"):
        Grid(half_width=0.0, n_points=64)


def test_complex_field_validation():
    g = Grid(half_width=5.0, n_points=32)
    with pytest.raises(ValueError, match="shape"):
        ComplexField(g, np.zeros(31))
    with pytest.raises(ValueError, match="non-finite"):
        ComplexField(g, np.full(32, np.nan))
    f = ComplexField(g, np.ones(32))
    assert f.values.dtype == complex


def test_spectral_derivative_exact_on_lattice_modes():
    g = Grid(half_width=np.pi, n_points=64)
    for m in (1, 3, 7):
        v = np.exp(1j * m * g.nodes)
        dv = spectral_derivative(v, g)
        assert np.max(np.abs(dv - 1j * m * v)) < 1e-12
    d2 = spectral_derivative(np.exp(1j * 3 * g.nodes), g, order=2)
    assert np.max(np.abs(d2 + 9 * np.exp(1j * 3 * g.nodes))) < 1e-11


def test_shift_and_gauge_properties():
    g = Grid(half_width=np.pi, n_points=128)
    rng = np.random.default_rng(7)
    coeff = np.zeros(128, dtype=complex)
    coeff[:20] = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    v = np.fft.ifft(coeff)
    # pure gauge
    w = shift_and_gauge(v, g, 0.7, 0.0)
    assert np.max(np.abs(w - np.exp(0.7j) * v)) < 1e-14
    # lattice shift by m*h is an index roll
    m = 5
    w = shift_and_gauge(v, g, 0.0, m * g.spacing)
    assert np.max(np.abs(w - np.roll(v, m))) < 1e-13
    # shifts compose
    w1 = shift_and_gauge(shift_and_gauge(v, g, 0.2, 0.3), g, 0.5, -0.8)
    w2 = shift_and_gauge(v, g, 0.7, -0.5)
    assert np.max(np.abs(w1 - w2)) < 1e-13


def test_norms_against_closed_forms():
    g = Grid(half_width=40.0, n_points=1024)
    v = np.exp(-0.5 * g.nodes**2)
    # ||e^{-x^2/2}||_2^2 = sqrt(pi)
    assert l2_norm(v, g) == pytest.approx(np.pi**0.25, rel=1e-12)
    # ||v'||^2 = sqrt(pi)/2, so ||v||_{H^1}^2 = 3 sqrt(pi)/2
    assert h1_norm(v, g) == pytest.approx(np.sqrt(1.5 * np.sqrt(np.pi)), rel=1e-10)
    assert grid_trapezoid(v**2, g) == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_phase_matched_half_width_removes_seam_gap():
    p = WaveParams(sigma=1.5, c=1.0)
    for target in (50.0, 200.0, 400.0):
        length = phase_matched_half_width(p, target)
        assert abs(length - target) < 2.0 * np.pi / p.c + 1e-9
        gap = p.c * length - (2.0 / p.sigma) * np.arctan(p.sigma * p.c * length)
        assert abs(gap / (2.0 * np.pi) - round(gap / (2.0 * np.pi))) < 1e-12
