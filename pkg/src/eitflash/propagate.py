"""Transmitted probe envelope for the incident waveforms of :mod:`eitflash.pulse`.

Three backends evaluate the same Fourier integral

    E(t) = (1/2 pi) int E~_i(W) H(delta_p + W) exp(-i W t) dW,   H = exp(-zeta)

* :func:`transmit_trace` samples the integrand on a uniform frequency grid and
  uses one FFT for a whole trace (square pulses).
* :func:`transmit_sample` integrates adaptively for a single instant (steps and
  square pulses); see :mod:`eitflash.quadrature`.
* :func:`transmit_periodic` sums the Fourier series of a periodic square drive,
  or, for long periods, superposes the step responses of past edges.

All backends remove the incident envelope analytically and only transform the
scattered part ``E~_i (H - 1)``, which decays one power of ``W`` faster.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.fft

from .errors import DomainError, GridError, TruncationError, WrapAroundWarning
from .medium import (
    MediumParams,
    _zeta_two_level,
    delta_pi,
    doppler_width,
    flash_time_scale,
    group_delay,
    scalar_zeta_function,
    zeta,
)
from .pulse import PulseKind, PulseSpec, fourier_series_coeffs, incident_amplitude, spectrum_square
from .quadrature import StepResponse

__all__ = [
    "SpectralGrid",
    "FieldTrace",
    "default_grid",
    "validate_grid",
    "transmit_field",
    "transmit_trace",
    "transmit_sample",
    "transmit_periodic",
    "periodic_amplitude",
    "sample_trace",
    "steady_state",
    "zero_plus",
    "incident_trace",
    "steady_trace",
    "transmit_like",
    "resolve_periodic_method",
]

MAX_SERIES_TERMS = 10**7
_CHUNK = 1 << 20


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform frequency grid ``W_k = k * resolution``, ``-n/2 <= k < n/2``.

    ``span`` is the one-sided extent, so ``resolution = 2 span / n_points``.
    The transform returns samples spaced by ``pi / span`` over one period
    ``2 pi / resolution`` of the implicitly periodised signal.
    """

    span: float
    n_points: int

    def __post_init__(self):
        n = int(self.n_points)
        if n < 2 or n & (n - 1):
            raise GridError(f"n_points must be a power of two, got {self.n_points}")
        if not self.span > 0:
            raise GridError("span must be positive")
        object.__setattr__(self, "n_points", n)

    @property
    def resolution(self) -> float:
        return 2.0 * self.span / self.n_points

    @property
    def dt(self) -> float:
        return math.pi / self.span

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.resolution


@dataclass(frozen=True)
class FieldTrace:
    """Complex transmitted envelope sampled at ``t0 + j dt``.

    ``backend`` records how the samples were produced (``"transform"``,
    ``"quadrature"``, ``"periodic"`` or ``"incident"``) so that derived
    quantities can be recomputed on the same footing.
    """

    t0: float
    dt: float
    samples: np.ndarray
    pulse: PulseSpec
    medium: Optional[MediumParams]
    backend: str = "transform"
    grid: Optional[SpectralGrid] = None
    method: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex, copy=True)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def index_of(self, t: float) -> int:
        """Index of the sample nearest to ``t``; raises if ``t`` is outside."""
        if len(self.samples) == 1:
            if abs(t - self.t0) > 1e-12 * max(1.0, abs(t)):
                raise DomainError(f"t={t:g} is not in the trace")
            return 0
        j = int(round((t - self.t0) / self.dt))
        if not 0 <= j < len(self.samples):
            raise DomainError(f"t={t:g} lies outside the trace")
        return j

    def aligned_with(self, other: "FieldTrace") -> bool:
        return (
            len(self) == len(other)
            and self.t0 == other.t0
            and self.dt == other.dt
        )


# -- grids -------------------------------------------------------------------


def _tail_time(medium: MediumParams) -> float:
    """Time after switch-off by which the transmitted field has died away."""
    return 8.0 * group_delay(medium) if medium.is_three_level else 50.0


def _required_period(pulse: PulseSpec, medium: MediumParams) -> float:
    return 1.1 * pulse.duration + _tail_time(medium)


def _resolution_limit(medium: MediumParams) -> float:
    limits = []
    if medium.is_three_level:
        limits.append(delta_pi(medium) / 20.0)
        limits.append(2 * math.pi / (8.0 * group_delay(medium)))
        if medium.gamma31 > 0:
            limits.append(medium.gamma31)
    return min(limits) if limits else math.inf


def _min_span(medium: MediumParams) -> float:
    span = 8.0 * medium.b0
    if medium.doppler_active:
        span = max(span, 8.0 * medium.b0 + 10.0 * doppler_width(medium))
    return span


def validate_grid(grid: SpectralGrid, medium: MediumParams, pulse: Optional[PulseSpec] = None):
    """Raise :class:`GridError` if ``grid`` cannot resolve ``medium``."""
    if grid.span < _min_span(medium) * (1 - 1e-12):
        raise GridError(
            f"grid span {grid.span:g} < {_min_span(medium):g} (8 b0 gamma21 plus Doppler margin)"
        )
    limit = _resolution_limit(medium)
    if grid.resolution > limit * (1 + 1e-12):
        raise GridError(f"grid resolution {grid.resolution:.3g} exceeds {limit:.3g}")
    if pulse is not None and pulse.kind is PulseKind.SQUARE:
        need = _required_period(pulse, medium)
        if grid.period < need:
            raise GridError(
                f"transform window {grid.period:.4g} shorter than pulse plus settling time {need:.4g}"
            )


def default_grid(medium: MediumParams, pulse: Optional[PulseSpec] = None, span: Optional[float] = None):
    """Smallest power-of-two grid that passes :func:`validate_grid`."""
    span = float(span) if span is not None else _min_span(medium)
    res = _resolution_limit(medium)
    if pulse is not None and pulse.kind is PulseKind.SQUARE:
        res = min(res, 2 * math.pi / _required_period(pulse, medium))
    if not math.isfinite(res):
        res = 2 * math.pi / 200.0
    n = 1 << max(4, math.ceil(math.log2(2.0 * span / res)))
    return SpectralGrid(span, n)


# -- transform backend ------------------------------------------------------


def _scattered_factor(delta, medium: MediumParams):
    """``H(delta) - 1`` without cancellation far from resonance."""
    return np.expm1(-zeta(delta, medium))


def transmit_field(
    envelope,
    spectrum,
    medium: MediumParams,
    grid: SpectralGrid,
    delta_p: float,
    t0: float,
    n_out: Optional[int] = None,
    pole_response=None,
):
    """Propagate an arbitrary envelope through the slab on ``grid``.

    Parameters
    ----------
    envelope : callable
        ``t -> E_i(t)`` in the time domain.
    spectrum : callable
        ``W -> E~_i(W)``, the matching analytic spectrum.
    t0 : float
        Time of the first output sample.
    n_out : int, optional
        Number of samples to return (default: one full period).
    pole_response : callable, optional
        ``t -> `` response of the envelope to the filter ``-zeta_two_level``.
        When given, that part is added in closed form and only the remainder
        ``H - 1 + zeta_two_level``, which falls off like ``1/W**2``, is
        transformed; this removes most of the truncation error near edges.

    Returns
    -------
    times, samples : ndarray
    """
    n = grid.n_points
    n_out = n if n_out is None else int(n_out)
    if n_out > n:
        raise GridError("requested more samples than one transform period holds")
    dw = grid.resolution
    buf = np.empty(n, dtype=complex)
    for start in range(0, n, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, n))
        k = np.where(k < n // 2, k, k - n)
        w = k * dw
        factor = _remainder(delta_p + w, medium) if pole_response else _scattered_factor(delta_p + w, medium)
        buf[start:start + len(k)] = spectrum(w) * factor * np.exp(-1j * w * t0)
    out = scipy.fft.fft(buf, overwrite_x=True)
    del buf
    out *= dw / (2 * math.pi)
    times = t0 + grid.dt * np.arange(n)
    alias = abs(out[-1])
    samples = out[:n_out] + envelope(times[:n_out])
    if pole_response:
        samples = samples + pole_response(times[:n_out])
    return times[:n_out], samples, alias


def transmit_trace(
    pulse: PulseSpec,
    medium: MediumParams,
    grid: Optional[SpectralGrid] = None,
    time_window: Optional[Tuple[float, float]] = None,
) -> FieldTrace:
    """Transmitted envelope of a square pulse over a time window.

    The periodic square drive is delegated to :func:`transmit_periodic`.  Step
    inputs have no finite spectral representation; use
    :func:`transmit_sample` or :func:`sample_trace` for them.
    """
    if pulse.kind is PulseKind.PERIODIC_SQUARE:
        if time_window is None:
            time_window = (pulse.switch_time - pulse.period, pulse.switch_time + pulse.period)
        n = 2001
        times = np.linspace(time_window[0], time_window[1], n)
        return transmit_periodic(pulse, medium, times)
    if pulse.kind is not PulseKind.SQUARE:
        raise DomainError("transform backend needs a square pulse; use transmit_sample for steps")
    grid = grid or default_grid(medium, pulse)
    validate_grid(grid, medium, pulse)
    rise = pulse.rise_time
    if time_window is None:
        time_window = (rise - 0.1 * pulse.duration, pulse.switch_time + _tail_time(medium))
    start, stop = map(float, time_window)
    if stop <= start:
        raise DomainError("time window must have stop > start")
    n_out = int(math.floor((stop - start) / grid.dt)) + 1
    if n_out > grid.n_points:
        raise GridError(
            f"time window {stop - start:.4g} longer than transform period {grid.period:.4g}"
        )
    times, samples, alias = transmit_field(
        lambda t: incident_amplitude(pulse, t),
        lambda w: spectrum_square(pulse, w),
        medium,
        grid,
        pulse.delta_p,
        start,
        n_out,
        lambda t: _pole_step(pulse.delta_p, medium.b0, t - pulse.rise_time)
        - _pole_step(pulse.delta_p, medium.b0, t - pulse.switch_time),
    )
    if alias > 1e-3:
        warnings.warn(
            f"scattered field wraps around the transform period (|E_s|={alias:.2e}); "
            "increase n_points",
            WrapAroundWarning,
            stacklevel=2,
        )
    tail = abs(samples[-1] - incident_amplitude(pulse, times[-1]))
    if stop > pulse.switch_time and tail > 1e-3:
        warnings.warn(
            f"trace ends while the transmitted field is still {tail:.2e}; window may be too short",
            WrapAroundWarning,
            stacklevel=2,
        )
    return FieldTrace(start, grid.dt, samples, pulse, medium, "transform", grid)


# -- quadrature backend -----------------------------------------------------


def _step_response(medium, delta_p, rtol):
    return StepResponse(medium, delta_p, rtol)


def transmit_sample(pulse: PulseSpec, medium: MediumParams, t, rtol: float = 1e-8):
    """Transmitted envelope at time(s) ``t`` by adaptive quadrature.

    Step-off responses follow from linearity, ``E_off = H(delta_p) - E_on``;
    square pulses are the difference of two step-on responses.
    """
    if pulse.kind is PulseKind.PERIODIC_SQUARE:
        return periodic_amplitude(pulse, medium, t)
    step = _step_response(medium, pulse.delta_p, rtol)
    t = np.asarray(t, dtype=float)
    s = pulse.switch_time
    if pulse.kind is PulseKind.STEP_ON:
        out = step.at(t - s)
    elif pulse.kind is PulseKind.STEP_OFF:
        out = step.steady - step.at(t - s)
    else:
        out = step.at(t - pulse.rise_time) - step.at(t - s)
    return out[()]


def sample_trace(
    pulse: PulseSpec, medium: MediumParams, t0: float, dt: float, n: int, rtol: float = 1e-8
) -> FieldTrace:
    """Uniformly sampled trace computed point by point with quadrature."""
    times = t0 + dt * np.arange(int(n))
    if pulse.kind is PulseKind.PERIODIC_SQUARE:
        return transmit_periodic(pulse, medium, times)
    samples = transmit_sample(pulse, medium, times, rtol)
    return FieldTrace(float(t0), float(dt), np.atleast_1d(samples), pulse, medium, "quadrature")


def steady_state(medium: MediumParams, delta_p: float) -> complex:
    """Monochromatic transmission ``H(delta_p)``."""
    return complex(np.exp(-zeta(float(delta_p), medium)))


def zero_plus(pulse: PulseSpec, medium: MediumParams) -> float:
    """Sampling instant used for ``I(0+)``: a hundredth of a flash time after the edge."""
    return pulse.switch_time + flash_time_scale(medium) / 100.0


# -- periodic drive -----------------------------------------------------------


def _pole_step(delta_p, b0, x):
    """Response of the filter ``-zeta_two_level`` to a unit step at ``x = 0``."""
    r = 0.25j * b0
    q = -0.5j - delta_p
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, (r / q) * -np.expm1(-1j * q * np.maximum(x, 0.0)), 0.0)


def _pole_response(delta_p, b0, period, tau):
    """Periodic response to the square drive of the filter ``-zeta_two_level``.

    ``-zeta_two_level(delta_p + W) = -r / (W - q)`` with ``r = i b0/4`` and
    ``q = -i/2 - delta_p`` has impulse response ``i r exp(-i q t) u(t)``; summing
    the step responses of all past edges gives a geometric series.
    """
    r = 0.25j * b0
    q = -0.5j - delta_p
    g0 = r / q
    half = 0.5 * period
    denom = 1.0 + np.exp(-1j * q * half)
    off = tau >= 0
    out = np.empty(tau.shape, dtype=complex)
    out[off] = g0 * np.exp(-1j * q * tau[off]) / denom
    on = ~off
    out[on] = g0 * (1.0 - np.exp(-1j * q * (tau[on] + half)) / denom)
    return out


def _remainder(delta, medium: MediumParams):
    """``H - 1 + zeta_two_level``; decays like ``1/delta**2``."""
    return np.expm1(-zeta(delta, medium)) + _zeta_two_level(delta, medium.b0)


def _fourier_cutoff(pulse: PulseSpec, medium: MediumParams, tol: float) -> int:
    omega_mod = 2 * math.pi / pulse.period
    floor_w = 10.0 * max(medium.b0, 1.0, medium.omega_c, abs(medium.delta_c), abs(pulse.delta_p))
    if medium.doppler_active:
        floor_w = max(floor_w, 10.0 * doppler_width(medium))
    coeff = medium.b0**2 / 32.0
    for _ in range(4):
        w = max(floor_w, math.sqrt(coeff / (2 * math.pi * tol)))
        probe = np.array([pulse.delta_p + w, pulse.delta_p - w])
        measured = float(np.max(np.abs(_remainder(probe, medium)))) * w * w
        if measured <= coeff * 1.05:
            break
        coeff = measured
    n = int(math.ceil(w / omega_mod))
    return n | 1


def _periodic_fourier(pulse, medium, tau, tol, n_max_limit):
    n_cut = _fourier_cutoff(pulse, medium, tol)
    if n_cut > n_max_limit:
        raise TruncationError(
            f"Fourier series needs {n_cut} harmonics for tail < {tol:g} (limit {n_max_limit})"
        )
    omega_mod = 2 * math.pi / pulse.period
    base = pulse.replace(switch_time=0.0)
    out = incident_amplitude(base, tau) + _pole_response(pulse.delta_p, medium.b0, pulse.period, tau)
    # c_0 term plus odd harmonics only.
    c0 = 0.5 * _remainder(np.array([pulse.delta_p]), medium)[0]
    out = out + c0
    chunk = max(1, (1 << 21) // max(1, tau.size))
    odd = np.arange(1, n_cut + 1, 2)
    for start in range(0, len(odd), chunk):
        k = odd[start:start + chunk]
        n = np.concatenate([k, -k])
        c = -1j / (math.pi * n)
        coeff = c * _remainder(pulse.delta_p + n * omega_mod, medium)
        out = out + np.exp(-1j * omega_mod * np.outer(tau, n)) @ coeff
    return out, n_cut


def _settle_time(medium: MediumParams) -> float:
    settle = 60.0
    if medium.is_three_level:
        tau = group_delay(medium)
        width = 2.0 * math.sqrt(tau) / medium.omega_c
        settle += tau + 20.0 * width
    return settle


def _periodic_images(pulse, medium, tau, tol, max_terms=100000, rtol=1e-8):
    step = _step_response(medium, pulse.delta_p, rtol)
    period = pulse.period
    half = 0.5 * period
    settle = _settle_time(medium)
    out = np.zeros(tau.shape, dtype=complex)
    for idx, t in np.ndenumerate(tau):
        total = 0j
        quiet = 0
        m = 0
        while True:
            a = t + half + m * period
            b = t + m * period
            term = (step(a) if a > 0 else 0.0) - (step(b) if b > 0 else 0.0)
            total += term
            if b > settle and abs(term) < tol:
                quiet += 1
                if quiet >= 2:
                    break
            else:
                quiet = 0
            m += 1
            if m > max_terms:
                raise TruncationError(f"edge superposition did not converge in {max_terms} periods")
        out[idx] = total
    return out, m


def _periodic_cost(pulse, medium, tol):
    """Rough run-time estimates (seconds per sample) of the two methods."""
    fourier = 6e-8 * _fourier_cutoff(pulse, medium, tol)
    images = 2 * 8e-3 * (_settle_time(medium) / pulse.period + 3)
    return fourier, images


def periodic_amplitude(
    pulse: PulseSpec,
    medium: MediumParams,
    t,
    method: str = "auto",
    tol: float = 1e-6,
    n_max_limit: int = MAX_SERIES_TERMS,
):
    """Steady periodic envelope under square modulation at time(s) ``t``.

    ``method`` is ``"fourier"`` (harmonic sum), ``"images"`` (superposition of
    the step responses of all past edges) or ``"auto"`` (cheaper of the two).
    """
    if pulse.kind is not PulseKind.PERIODIC_SQUARE:
        raise DomainError("periodic_amplitude needs a periodic_square pulse")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    period = pulse.period
    # Reduce to one period with the on-interval at [-T/2, 0).
    tau = np.mod(t - pulse.switch_time + 0.5 * period, period) - 0.5 * period
    if method == "auto":
        method = resolve_periodic_method(pulse, medium, tol, n_max_limit)
    if method == "fourier":
        out, _ = _periodic_fourier(pulse, medium, tau, tol, n_max_limit)
    elif method == "images":
        out, _ = _periodic_images(pulse, medium, tau, tol)
    else:
        raise DomainError(f"unknown periodic method {method!r}")
    return out[0] if scalar else out


def resolve_periodic_method(pulse: PulseSpec, medium: MediumParams, tol: float = 1e-6,
                            n_max_limit: int = MAX_SERIES_TERMS) -> str:
    """Method that ``periodic_amplitude(..., method="auto")`` would use."""
    if _fourier_cutoff(pulse, medium, tol) > n_max_limit:
        return "images"
    fourier_cost, images_cost = _periodic_cost(pulse, medium, tol)
    return "fourier" if fourier_cost <= images_cost else "images"


def transmit_periodic(
    pulse: PulseSpec, medium: MediumParams, times, method: str = "auto", tol: float = 1e-6
) -> FieldTrace:
    """Exact steady periodic response sampled at uniformly spaced ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size > 1:
        steps = np.diff(times)
        dt = float(steps.mean())
        if not np.allclose(steps, dt, rtol=1e-9, atol=1e-12 * max(1.0, abs(dt))):
            raise DomainError("transmit_periodic needs uniformly spaced times")
    else:
        dt = 0.0
    if method == "auto":
        method = resolve_periodic_method(pulse, medium, tol)
    samples = periodic_amplitude(pulse, medium, times, method=method, tol=tol)
    return FieldTrace(float(times[0]), dt, np.atleast_1d(samples), pulse, medium, "periodic",
                      method=method)


def incident_trace(trace: FieldTrace) -> FieldTrace:
    """Incident envelope on the sampling of ``trace``."""
    samples = np.atleast_1d(incident_amplitude(trace.pulse, trace.times))
    if trace.backend == "steady":
        samples = np.ones(len(trace), dtype=complex)
    return FieldTrace(trace.t0, trace.dt, samples, trace.pulse, None, "incident", trace.grid)


def steady_trace(medium: MediumParams, delta_p: float) -> FieldTrace:
    """One-sample trace holding the monochromatic response ``H(delta_p)``."""
    pulse = PulseSpec(PulseKind.STEP_ON, delta_p=delta_p)
    return FieldTrace(math.inf, 0.0, [steady_state(medium, delta_p)], pulse, medium, "steady")


def transmit_like(trace: FieldTrace, medium: MediumParams) -> FieldTrace:
    """Recompute ``trace`` for another medium on exactly the same footing.

    The backend, grid, time window and periodic method are reused, so two
    traces from this function are sample-for-sample comparable.
    """
    pulse = trace.pulse
    if trace.backend == "steady":
        return steady_trace(medium, pulse.delta_p)
    if trace.backend == "transform":
        times, samples, _ = transmit_field(
            lambda t: incident_amplitude(pulse, t),
            lambda w: spectrum_square(pulse, w),
            medium,
            trace.grid,
            pulse.delta_p,
            trace.t0,
            len(trace),
            lambda t: _pole_step(pulse.delta_p, medium.b0, t - pulse.rise_time)
            - _pole_step(pulse.delta_p, medium.b0, t - pulse.switch_time),
        )
        return FieldTrace(trace.t0, trace.dt, samples, pulse, medium, "transform", trace.grid)
    if trace.backend == "quadrature":
        samples = np.atleast_1d(transmit_sample(pulse, medium, trace.times))
        return FieldTrace(trace.t0, trace.dt, samples, pulse, medium, "quadrature")
    if trace.backend == "periodic":
        return transmit_periodic(pulse, medium, trace.times, method=trace.method or "auto")
    raise DomainError(f"cannot recompute a trace of backend {trace.backend!r}")
