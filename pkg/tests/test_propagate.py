import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import j1

from eitflash.errors import DomainError, GridError, TruncationError
from eitflash.medium import MediumParams, delta_pi, flash_time_scale, group_delay
from eitflash.propagate import (
    FieldTrace,
    SpectralGrid,
    default_grid,
    incident_trace,
    periodic_amplitude,
    resolve_periodic_method,
    sample_trace,
    steady_state,
    steady_trace,
    transmit_like,
    transmit_periodic,
    transmit_sample,
    transmit_trace,
    validate_grid,
    zero_plus,
)
from eitflash.pulse import PulseKind, PulseSpec, incident_amplitude


def bessel_step_on(t, b0, delta_p):
    # Two-level step response from the time-domain impulse response
    # delta(t) - exp((i delta_p - 1/2) s) sqrt(beta/s) J1(2 sqrt(beta s)), beta = b0/4,
    # i.e. the inverse Laplace transform of exp(-beta/p).
    if t <= 0:
        return 0j
    beta = b0 / 4

    def kernel(s):
        if s == 0:
            return beta
        return np.exp((1j * delta_p - 0.5) * s) * math.sqrt(beta / s) * j1(2 * math.sqrt(beta * s))

    re = quad(lambda s: kernel(s).real, 0, t, limit=2000, epsabs=1e-13)[0]
    im = quad(lambda s: kernel(s).imag, 0, t, limit=2000, epsabs=1e-13)[0]
    return 1 - (re + 1j * im)


@pytest.mark.parametrize("b0,delta_p", [(20, 0.0), (20, 0.7), (200, 0.0), (200, -3.0)])
def test_quadrature_matches_bessel_oracle(b0, delta_p):
    m = MediumParams(b0=b0)
    pulse = PulseSpec(PulseKind.STEP_ON, delta_p=delta_p)
    for t in (0.01, 0.3, 2.0, 10.0):
        assert abs(transmit_sample(pulse, m, t) - bessel_step_on(t, b0, delta_p)) < 1e-9


def test_step_before_edge_is_incident():
    m = MediumParams(b0=50)
    # The Fourier integral itself vanishes before the edge; nothing is special-cased.
    for t in (-1.0, -0.01, -30.0):
        assert abs(transmit_sample(PulseSpec(PulseKind.STEP_ON, delta_p=0.2), m, t)) < 1e-12
    off = transmit_sample(PulseSpec(PulseKind.STEP_OFF, delta_p=0.3), m, -1.0)
    assert off == pytest.approx(steady_state(m, 0.3), abs=1e-12)


def test_step_on_settles_to_steady_state():
    m = MediumParams(b0=20, omega_c=1.0)
    on = transmit_sample(PulseSpec(PulseKind.STEP_ON, delta_p=0.05), m, 400.0)
    assert abs(on - steady_state(m, 0.05)) < 1e-6


def test_on_off_complementary(lambda_medium):
    t = np.array([0.001, 0.01, 0.5, 30.0, 900.0])
    for dp in (0.0, delta_pi(lambda_medium)):
        on = transmit_sample(PulseSpec(PulseKind.STEP_ON, delta_p=dp), lambda_medium, t)
        off = transmit_sample(PulseSpec(PulseKind.STEP_OFF, delta_p=dp), lambda_medium, t)
        assert np.max(np.abs(on + off - steady_state(lambda_medium, dp))) < 1e-12


def test_square_is_difference_of_steps():
    m = MediumParams(b0=30)
    sq = PulseSpec(PulseKind.SQUARE, duration=5.0, switch_time=2.0, delta_p=0.4)
    t = np.array([-2.5, -1.0, 1.0, 2.5, 6.0])
    step = PulseSpec(PulseKind.STEP_ON, delta_p=0.4)
    expect = transmit_sample(step, m, t + 3.0) - transmit_sample(step, m, t - 2.0)
    assert np.allclose(transmit_sample(sq, m, t), expect, atol=1e-12)


def test_grid_validation():
    with pytest.raises(GridError):
        SpectralGrid(100.0, 1000)
    with pytest.raises(GridError):
        SpectralGrid(-1.0, 1024)
    m = MediumParams(b0=20)
    with pytest.raises(GridError):
        validate_grid(SpectralGrid(100.0, 1 << 12), m)
    lam = MediumParams(b0=20, omega_c=1.0)
    with pytest.raises(GridError):
        validate_grid(SpectralGrid(160.0, 1 << 10), lam)
    g = default_grid(lam, PulseSpec(PulseKind.SQUARE, duration=100.0))
    validate_grid(g, lam, PulseSpec(PulseKind.SQUARE, duration=100.0))
    assert g.n_points & (g.n_points - 1) == 0


def test_window_longer_than_period_rejected():
    m = MediumParams(b0=20)
    pulse = PulseSpec(PulseKind.SQUARE, duration=20.0)
    g = default_grid(m, pulse)
    with pytest.raises(GridError):
        transmit_trace(pulse, m, g, time_window=(-30.0, -30.0 + 2 * g.period))


def test_step_needs_sample_backend():
    with pytest.raises(DomainError):
        transmit_trace(PulseSpec(PulseKind.STEP_OFF), MediumParams(b0=20))


@pytest.mark.parametrize("medium", [MediumParams(b0=20), MediumParams(b0=20, omega_c=1.0)])
def test_transform_matches_quadrature(medium):
    pulse = PulseSpec(PulseKind.SQUARE, duration=60.0, switch_time=0.0, delta_p=0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        trace = transmit_trace(pulse, medium)
    rng = np.random.default_rng(3)
    idx = rng.choice(len(trace), 40, replace=False)
    ref = transmit_sample(pulse, medium, trace.times[idx])
    assert np.max(np.abs(trace.samples[idx] - ref)) < 1e-5


def test_transform_is_causal():
    m = MediumParams(b0=20)
    pulse = PulseSpec(PulseKind.SQUARE, duration=30.0)
    trace = transmit_trace(pulse, m)
    before = trace.times < pulse.rise_time - 0.5
    assert np.max(np.abs(trace.samples[before])) < 1e-5


def test_trace_samples_are_read_only():
    m = MediumParams(b0=20)
    trace = sample_trace(PulseSpec(PulseKind.STEP_OFF), m, 0.0, 0.1, 4)
    with pytest.raises(ValueError):
        trace.samples[0] = 1.0
    assert trace.backend == "quadrature"
    assert trace.index_of(0.2) == 2
    with pytest.raises(DomainError):
        trace.index_of(5.0)


def test_transmit_like_reproduces_trace():
    m = MediumParams(b0=20, omega_c=1.0)
    pulse = PulseSpec(PulseKind.SQUARE, duration=60.0)
    trace = transmit_trace(pulse, m)
    again = transmit_like(trace, m)
    assert again.aligned_with(trace)
    assert np.array_equal(again.samples, trace.samples)
    q = sample_trace(pulse, m, -5.0, 1.0, 5)
    assert np.array_equal(transmit_like(q, m).samples, q.samples)


def test_incident_and_steady_traces():
    m = MediumParams(b0=20, omega_c=1.0)
    s = steady_trace(m, 0.0)
    assert len(s) == 1 and s.samples[0] == pytest.approx(1.0)
    assert incident_trace(s).samples[0] == 1
    pulse = PulseSpec(PulseKind.SQUARE, duration=4.0)
    q = sample_trace(pulse, m, -6.0, 1.0, 8)
    assert np.array_equal(incident_trace(q).samples, incident_amplitude(pulse, q.times))


def test_zero_plus_offset(two_level):
    pulse = PulseSpec(PulseKind.STEP_OFF, switch_time=3.0)
    assert zero_plus(pulse, two_level) == pytest.approx(3.0 + flash_time_scale(two_level) / 100)


def test_periodic_methods_agree():
    m = MediumParams(b0=20, omega_c=1.0)
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=40.0, delta_p=0.1)
    t = np.array([-15.0, -0.5, 0.05, 3.0, 17.0])
    a = periodic_amplitude(pulse, m, t, method="fourier")
    b = periodic_amplitude(pulse, m, t, method="images")
    assert np.max(np.abs(a - b)) < 1e-5


def test_periodic_is_periodic():
    m = MediumParams(b0=20)
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=2.0)
    t = np.array([0.1, 0.7, 1.3])
    assert np.allclose(periodic_amplitude(pulse, m, t), periodic_amplitude(pulse, m, t + 6.0),
                       atol=1e-12)


def test_slow_periodic_matches_step_off(lambda_medium):
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=1e3 * group_delay(lambda_medium))
    t = zero_plus(pulse, lambda_medium)
    step = transmit_sample(PulseSpec(PulseKind.STEP_OFF), lambda_medium, t)
    assert abs(periodic_amplitude(pulse, lambda_medium, t) - step) < 1e-6


def test_periodic_truncation_guard():
    m = MediumParams(b0=200)
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=1.0)
    with pytest.raises(TruncationError):
        periodic_amplitude(pulse, m, 0.0, method="fourier", n_max_limit=10)
    assert resolve_periodic_method(pulse, m) in ("fourier", "images")


def test_transmit_periodic_records_method():
    m = MediumParams(b0=20)
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=2.0)
    trace = transmit_periodic(pulse, m, np.linspace(-1, 1, 5))
    assert trace.backend == "periodic" and trace.method in ("fourier", "images")
    with pytest.raises(DomainError):
        transmit_periodic(pulse, m, [0.0, 0.1, 0.5])


def test_field_trace_is_hashable_value():
    p = PulseSpec(PulseKind.STEP_OFF)
    a = FieldTrace(0.0, 1.0, [1, 2], p, None)
    assert len(a) == 2 and np.array_equal(a.times, [0.0, 1.0])
