"""Step response of the slab by direct evaluation of the Fourier integral.

For a probe switched on at ``t = 0`` with carrier detuning ``delta_p`` the
transmitted envelope is::

    E_on(t) = H(delta_p) u(t)
              + (1/2 pi) PV int i [H(delta_p + W) - H(delta_p)] / W exp(-i W t) dW

where ``H = exp(-zeta)``.  The bracket vanishes at ``W = 0``, so the integrand
is regular.  Folding onto ``W > 0`` gives one cosine and one sine transform.
Both are evaluated panel by panel with QUADPACK's oscillatory rules (QAWO on
finite panels, QAWF on the semi-infinite tail).  The slowly decaying
``2 i (1 - H(delta_p)) / W`` part of the sine integrand is integrated in
closed form on the tail through the sine integral ``Si``.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import sici

from .errors import QuadratureError
from .medium import MediumParams, doppler_width, scalar_zeta_function

__all__ = ["StepResponse"]

_LIMIT = 400
_TAIL_CYCLES = 400


def _breakpoints(medium: MediumParams, delta_p: float):
    scales = [1.0, medium.b0, abs(delta_p)]
    if medium.is_three_level:
        tau = medium.b0 / medium.omega_c**2
        scales += [medium.omega_c, 0.5 * medium.omega_c, 1.0 / tau, math.pi / tau]
        scales += [abs(medium.delta_c), abs(medium.delta_c - delta_p)]
        scales += [0.5 * medium.omega_c + abs(delta_p), abs(0.5 * medium.omega_c - abs(delta_p))]
        if medium.gamma31 > 0:
            scales.append(medium.gamma31)
    if medium.doppler_active:
        kv = doppler_width(medium)
        scales += [kv, 3 * kv, 6 * kv]
    positive = [s for s in scales if s > 0]
    lo = max(min(positive) * 1e-3, 1e-9)
    hi = 20.0 * max(positive + [medium.b0, 10.0])
    decades = math.log10(hi / lo)
    pts = set(np.geomspace(lo, hi, int(math.ceil(4 * decades)) + 1).tolist())
    pts.update(s for s in positive if lo < s < hi)
    return np.array(sorted(pts)), hi


# Stand-in for a quadrature node at W = 0, where the integrands are 0/0 but smooth.
_W_ZERO = 1e-9


class StepResponse:
    """Transmitted envelope for a probe switched on at ``t = 0``.

    Parameters
    ----------
    medium : MediumParams
    delta_p : float
        Probe carrier detuning.
    rtol : float
        Relative tolerance of the quadrature.  The absolute target is
        ``rtol / 10`` in units of the incident amplitude.

    Notes
    -----
    One instance caches the breakpoint layout and ``H(delta_p)``; calling it
    at many times is cheaper than building a new one for each.
    """

    def __init__(self, medium: MediumParams, delta_p: float = 0.0, rtol: float = 1e-8):
        self.medium = medium
        self.delta_p = float(delta_p)
        self.rtol = float(rtol)
        self._zeta = scalar_zeta_function(medium)
        self.steady = complex(np.exp(-self._zeta(self.delta_p)))
        self._points, self._tail_start = _breakpoints(medium, self.delta_p)
        self.last_error = 0.0

    def _h(self, delta):
        return complex(np.exp(-self._zeta(delta)))

    def _cos_part(self, w):
        dp = self.delta_p
        w = w or _W_ZERO
        return 1j * (self._h(dp + w) - self._h(dp - w)) / w

    def _sin_part(self, w):
        dp = self.delta_p
        w = w or _W_ZERO
        return 1j * (self._h(dp + w) + self._h(dp - w) - 2.0 * self.steady) / w

    def _sin_part_reduced(self, w):
        # Same as _sin_part with the 2i(1 - H(delta_p))/w asymptote removed.
        dp = self.delta_p
        w = w or _W_ZERO
        return 1j * (self._h(dp + w) + self._h(dp - w) - 2.0) / w

    def _transform(self, func, a, b, weight, omega, epsabs):
        """Integrate complex ``func`` against a cos/sin weight on ``[a, b]``."""
        values = []
        err = 0.0
        for part in (lambda x: func(x).real, lambda x: func(x).imag):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                if math.isinf(b):
                    out = quad(part, a, b, weight=weight, wvar=omega, epsabs=epsabs,
                               limlst=_TAIL_CYCLES, limit=_LIMIT, full_output=1)
                else:
                    out = quad(part, a, b, weight=weight, wvar=omega, epsabs=epsabs,
                               epsrel=self.rtol, limit=_LIMIT, full_output=1)
            value, abserr = out[0], out[1]
            if len(out) > 3 and abserr > 10 * epsabs + self.rtol * abs(value):
                message = out[3].splitlines()[0] if out[3] else "no message"
                raise QuadratureError(
                    f"quadrature did not converge on [{a:g}, {b:g}] at |t|={omega:g}: {message}",
                    achieved=abserr,
                )
            values.append(value)
            err += abserr
        return complex(values[0], values[1]), err

    def __call__(self, t: float) -> complex:
        t = float(t)
        if t == 0.0:
            sign = 0.0
        else:
            sign = math.copysign(1.0, t)
        omega = abs(t)
        pts = self._points
        atol = 0.1 * self.rtol
        epsabs = atol / (2 * len(pts) + 4)

        cos_total = 0j
        sin_total = 0j
        err = 0.0
        a = 0.0
        for b in pts:
            c, e = self._transform(self._cos_part, a, b, "cos", omega, epsabs)
            cos_total += c
            err += e
            if sign:
                s, e = self._transform(self._sin_part, a, b, "sin", omega, epsabs)
                sin_total += s
                err += e
            a = b
        tail = self._tail_start
        if omega > 0:
            c, e = self._transform(self._cos_part, tail, math.inf, "cos", omega, epsabs)
            cos_total += c
            err += e
            s, e = self._transform(self._sin_part_reduced, tail, math.inf, "sin", omega, epsabs)
            sin_total += s
            err += e
            si_tail = 0.5 * math.pi - sici(tail * omega)[0]
            sin_total += 2j * (1.0 - self.steady) * si_tail
        else:
            # t = 0: cosine transform without oscillation; integrand is O(1/w^2).
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                for part, scale in ((lambda x: self._cos_part(x).real, 1.0),
                                    (lambda x: self._cos_part(x).imag, 1j)):
                    v, e = quad(part, tail, math.inf, epsabs=epsabs, epsrel=self.rtol,
                                limit=_LIMIT)[:2]
                    cos_total += scale * v
                    err += e
        self.last_error = err / (2 * math.pi)
        if self.last_error > 10 * atol + self.rtol:
            raise QuadratureError(
                f"step response at t={t:g} reached only {self.last_error:.3g}",
                achieved=self.last_error,
            )
        integral = cos_total - 1j * sign * sin_total
        unit = 0.5 if sign == 0 else (1.0 if sign > 0 else 0.0)
        return self.steady * unit + integral / (2 * math.pi)

    def at(self, times) -> np.ndarray:
        """Vectorised evaluation over an array of times."""
        times = np.asarray(times, dtype=float)
        out = np.empty(times.shape, dtype=complex)
        for idx, t in np.ndenumerate(times):
            out[idx] = self(t)
        return out
