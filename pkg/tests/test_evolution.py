"""Integrator unit tests (short horizons; the long experiment lives in
the acceptance suite)."""

import numpy as np
import pytest

from gdnlslab.core import (
    ComplexField,
    Grid,
    ProfileKind,
    WaveParams,
    phase_matched_half_width,
)
from gdnlslab import evolution as ev
from gdnlslab import negdir
from gdnlslab import profiles as pr

P = WaveParams(sigma=1.5, c=1.0)


def _grid(target=100.0, n=2048):
    return Grid(phase_matched_half_width(P, target), n)


def test_integrator_spec_validation():
    with pytest.raises(ValueError, match="dt"):
        ev.IntegratorSpec(dt=0.0)


def test_short_soliton_run_conserves_and_tracks():
    g = _grid()
    phi = pr.sample(P, g, ProfileKind.PHI)
    spec = ev.IntegratorSpec(dt=5e-4)
    trace = ev.evolve(phi, P, 0.5, spec, sample_every=200)
    assert trace.drift("mass") < 1e-10
    assert trace.drift("momentum") < 1e-9
    assert trace.drift("energy") < 1e-9
    t = np.asarray(trace.times)
    assert np.max(np.abs(np.asarray(trace.shift) - P.c * t)) < 1e-5
    dtheta = np.asarray(trace.theta) - P.omega * t
    dtheta = (dtheta + np.pi) % (2 * np.pi) - np.pi
    assert np.max(np.abs(dtheta)) < 1e-5
    assert max(trace.orbit_distance) < 5e-3


def test_trace_first_sample_is_initial_data():
    g = _grid()
    phi = pr.sample(P, g, ProfileKind.PHI)
    trace = ev.evolve(phi, P, 0.01, ev.IntegratorSpec(dt=1e-3), sample_every=5)
    assert trace.times[0] == 0.0
    assert trace.drift("mass") >= 0.0
    assert trace.orbit_distance[0] < 1e-3


def test_determinism():
    g = _grid()
    phi = pr.sample(P, g, ProfileKind.PHI)
    spec = ev.IntegratorSpec(dt=1e-3)
    t1 = ev.evolve(phi, P, 0.1, spec, sample_every=20)
    t2 = ev.evolve(phi, P, 0.1, spec, sample_every=20)
    assert t1.times == t2.times
    assert t1.mass == t2.mass
    assert t1.theta == t2.theta


def test_blow_up_error_carries_time():
    g = _grid()
    phi = pr.sample(P, g, ProfileKind.PHI)
    huge = ComplexField(g, 50.0 * phi.values)
    spec = ev.IntegratorSpec(dt=1e-3, max_amplitude=10.0)
    with pytest.raises(ev.BlowUpError) as excinfo:
        ev.evolve(huge, P, 1.0, spec, sample_every=1, track_modulation=False)
    assert excinfo.value.time > 0.0


def test_instability_experiment_shapes_and_control_reuse():
    g = _grid(60.0, 2048)
    direction = negdir.build_psi(P, 10.0, g)
    spec = ev.IntegratorSpec(dt=1e-3)
    out = ev.instability_experiment(
        P, direction, 0.01, 0.3, spec, sample_every=100
    )
    assert set(out) >= {
        "control",
        "perturbed",
        "escape_time",
        "a_monotone_fraction",
        "a_orientation",
        "initial_distance",
        "max_control_distance",
    }
    assert out["initial_distance"] > 0.0
    # the control can be reused: same object comes back
    again = ev.instability_experiment(
        P, direction, -0.01, 0.3, spec, sample_every=100, control=out["control"]
    )
    assert again["control"] is out["control"]
    assert 0.0 <= again["a_monotone_fraction"] <= 1.0


def test_convergence_study_reports_fourth_order():
    # N = 4096 so that the coarsened half of the grid still resolves
    # the profile's exponential Fourier tail
    g = _grid(60.0, 4096)
    out = ev.convergence_study(P, g, 0.2, dts=(8e-3, 4e-3, 2e-3))
    assert out["temporal_order"] == pytest.approx(4.0, abs=0.5)
    assert out["errors"][0] > out["errors"][-1]
    assert out["spatial_gap"] < 1e-5
