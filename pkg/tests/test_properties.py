import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from eitflash.decompose import wrap_phase
from eitflash.medium import MediumParams, zeta
from eitflash.propagate import steady_state, transmit_sample
from eitflash.pulse import PulseKind, PulseSpec, incident_amplitude

b0s = st.floats(1.0, 400.0)
detunings = st.floats(-50.0, 50.0)
omegas = st.one_of(st.just(0.0), st.floats(0.05, 3.0))
gammas = st.floats(0.0, 0.1)
times = st.floats(-20.0, 20.0)

FAST = settings(max_examples=40, deadline=None)


@FAST
@given(b0s, omegas, gammas, st.floats(-0.5, 0.5), detunings)
def test_medium_never_amplifies(b0, omega_c, gamma31, delta_c, delta):
    m = MediumParams(b0=b0, omega_c=omega_c, gamma31=gamma31, delta_c=delta_c)
    assert zeta(delta, m).real >= -1e-12 * b0


@FAST
@given(b0s, omegas, gammas, detunings)
def test_detuning_symmetry(b0, omega_c, gamma31, delta):
    m = MediumParams(b0=b0, omega_c=omega_c, gamma31=gamma31)
    assert abs(zeta(-delta, m) - np.conj(zeta(delta, m))) <= 1e-9 * (1 + abs(zeta(delta, m)))


@FAST
@given(b0s, st.floats(-3.0, 3.0), st.floats(-30.0, -1e-3))
def test_causality(b0, delta_p, t):
    m = MediumParams(b0=b0)
    assert abs(transmit_sample(PulseSpec(PulseKind.STEP_ON, delta_p=delta_p), m, t)) < 1e-10


@FAST
@given(b0s, st.floats(-3.0, 3.0), st.floats(-5.0, 5.0), st.floats(1e-3, 10.0))
def test_time_shift_invariance(b0, delta_p, shift, t):
    m = MediumParams(b0=b0)
    moved = PulseSpec(PulseKind.STEP_ON, delta_p=delta_p, switch_time=shift)
    base = PulseSpec(PulseKind.STEP_ON, delta_p=delta_p)
    assert abs(transmit_sample(moved, m, t + shift) - transmit_sample(base, m, t)) < 1e-9


@FAST
@given(st.floats(1.0, 100.0), st.floats(-2.0, 2.0), st.floats(0.1, 20.0), times)
def test_linearity_square_from_steps(b0, delta_p, duration, t):
    m = MediumParams(b0=b0, omega_c=1.0)
    sq = PulseSpec(PulseKind.SQUARE, delta_p=delta_p, duration=duration)
    on = PulseSpec(PulseKind.STEP_ON, delta_p=delta_p)
    expect = transmit_sample(on, m, t + duration) - transmit_sample(on, m, t)
    assert abs(transmit_sample(sq, m, t) - expect) < 1e-9


@settings(max_examples=20, deadline=None)
@given(b0s, omegas, st.floats(-1.0, 1.0), st.floats(1e-3, 50.0))
def test_on_plus_off_is_steady(b0, omega_c, delta_p, t):
    m = MediumParams(b0=b0, omega_c=omega_c)
    on = transmit_sample(PulseSpec(PulseKind.STEP_ON, delta_p=delta_p), m, t)
    off = transmit_sample(PulseSpec(PulseKind.STEP_OFF, delta_p=delta_p), m, t)
    assert abs(on + off - steady_state(m, delta_p)) < 1e-12


@FAST
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0), times)
def test_periodic_envelope_has_half_duty(period, switch, t):
    p = PulseSpec(PulseKind.PERIODIC_SQUARE, period=period, switch_time=switch)
    a, b = incident_amplitude(p, t), incident_amplitude(p, t + 0.5 * period)
    edge = np.mod(t - switch, 0.5 * period)
    if min(edge, 0.5 * period - edge) > 1e-9 * period:
        assert a + b == 1


@FAST
@given(st.floats(-100.0, 100.0))
def test_wrap_phase_idempotent(phi):
    w = wrap_phase(phi)
    assert -math.pi < w <= math.pi
    assert wrap_phase(w) == w
    assert abs(math.remainder(w - phi, 2 * math.pi)) < 1e-9
