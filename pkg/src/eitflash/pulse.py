"""Incident probe envelopes.

Envelopes are expressed in the frame rotating at the probe carrier, take only
the values 0 and 1, and are normalised so that ``|E_i| = 1`` while the probe is
on.  The carrier detuning ``delta_p`` is carried along with the envelope but
only enters through the medium response.

Fourier conventions follow the transmitted-field integral used throughout the
package::

    E~(W) = int E(t) exp(+i W t) dt,     E(t) = (1/2 pi) int E~(W) exp(-i W t) dW
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DomainError
from .medium import MediumParams, group_delay

__all__ = [
    "PulseKind",
    "PulseSpec",
    "incident_amplitude",
    "fourier_series_coeffs",
    "spectrum_square",
    "default_square",
]


class PulseKind(str, enum.Enum):
    STEP_ON = "step_on"
    STEP_OFF = "step_off"
    SQUARE = "square"
    PERIODIC_SQUARE = "periodic_square"


@dataclass(frozen=True)
class PulseSpec:
    """Incident waveform.

    The probe is switched off at ``switch_time`` (for ``step_on`` this is the
    switch-on instant instead).  A ``square`` pulse is on during
    ``(switch_time - duration, switch_time)``; a ``periodic_square`` drive is on
    during ``(switch_time - period/2, switch_time)`` and repeats with period
    ``period``.  Edges themselves belong to the off state.
    """

    kind: PulseKind
    delta_p: float = 0.0
    switch_time: float = 0.0
    duration: Optional[float] = None
    period: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        if self.kind is PulseKind.SQUARE:
            if self.duration is None or not self.duration > 0:
                raise DomainError("square pulse needs duration > 0")
        if self.kind is PulseKind.PERIODIC_SQUARE:
            if self.period is None or not self.period > 0:
                raise DomainError("periodic square pulse needs period > 0")
        if not math.isfinite(self.delta_p) or not math.isfinite(self.switch_time):
            raise DomainError("delta_p and switch_time must be finite")

    @property
    def has_falling_edge(self) -> bool:
        return self.kind is not PulseKind.STEP_ON

    @property
    def rise_time(self) -> Optional[float]:
        """Instant of the (last) rising edge, if the pulse has one."""
        if self.kind is PulseKind.STEP_ON:
            return self.switch_time
        if self.kind is PulseKind.SQUARE:
            return self.switch_time - self.duration
        if self.kind is PulseKind.PERIODIC_SQUARE:
            return self.switch_time - 0.5 * self.period
        return None

    def with_detuning(self, delta_p: float) -> "PulseSpec":
        return replace(self, delta_p=float(delta_p))

    def replace(self, **changes) -> "PulseSpec":
        return replace(self, **changes)


def default_square(medium: MediumParams, delta_p: float = 0.0) -> PulseSpec:
    """Square pulse long enough for the steady state to build up.

    Four slow-light delays for a Lambda medium, ``100/gamma21`` otherwise.
    """
    duration = 4.0 * group_delay(medium) if medium.is_three_level else 100.0
    return PulseSpec(PulseKind.SQUARE, delta_p=delta_p, duration=duration)


def incident_amplitude(pulse: PulseSpec, t):
    """Envelope of the incident field at time(s) ``t``; values are 0 or 1."""
    t = np.asarray(t, dtype=float)
    s = pulse.switch_time
    kind = pulse.kind
    if kind is PulseKind.STEP_ON:
        on = t > s
    elif kind is PulseKind.STEP_OFF:
        on = t < s
    elif kind is PulseKind.SQUARE:
        on = (t > s - pulse.duration) & (t < s)
    else:
        phase = np.mod(t - s, pulse.period)
        on = phase > 0.5 * pulse.period
    return on.astype(complex)[()]


def fourier_series_coeffs(pulse: PulseSpec, n_max: int):
    """Exact Fourier coefficients of the 50 % duty-cycle envelope.

    With ``W = 2 pi / period`` the envelope is ``sum_n c_n exp(-i n W t)``.
    For the on-interval ``(-T/2, 0)``: ``c_0 = 1/2``, ``c_n = -i/(pi n)`` for odd
    ``n`` and zero for even ``n != 0``; a non-zero ``switch_time`` multiplies
    ``c_n`` by ``exp(i n W switch_time)``.

    Returns
    -------
    n : ndarray of int
        Harmonic indices ``-n_max .. n_max``.
    c : ndarray of complex
    """
    if pulse.kind is not PulseKind.PERIODIC_SQUARE:
        raise DomainError("Fourier series coefficients need a periodic_square pulse")
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    n = np.arange(-n_max, n_max + 1)
    c = np.zeros(n.shape, dtype=complex)
    odd = (n % 2) == 1
    c[odd] = -1j / (np.pi * n[odd])
    c[n == 0] = 0.5
    if pulse.switch_time:
        c *= np.exp(1j * n * (2 * np.pi / pulse.period) * pulse.switch_time)
    return n, c


def spectrum_square(pulse: PulseSpec, omega):
    """Closed-form spectrum of a single square envelope.

    ``duration * exp(i W (switch_time - duration/2)) * sinc(W duration / 2 pi)``;
    the value at ``W = 0`` is the pulse area and the zeros sit at
    ``W = 2 pi m / duration``.
    """
    if pulse.kind is not PulseKind.SQUARE:
        raise DomainError("spectrum_square needs a square pulse")
    omega = np.asarray(omega, dtype=float)
    d = pulse.duration
    centre = pulse.switch_time - 0.5 * d
    return d * np.exp(1j * omega * centre) * np.sinc(omega * d / (2 * np.pi))
