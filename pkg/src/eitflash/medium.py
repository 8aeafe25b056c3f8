"""Linear optical response of a dilute two-level or Lambda-type atomic slab.

All rates and detunings are expressed in units of the excited-state linewidth
``gamma21`` and all times in units of ``1/gamma21``.  The physical value of
``gamma21`` (rad/s) is only used to convert Doppler widths and to report
results in SI units.

The response of the slab at detuning ``delta`` is summarised by the complex
opacity ``zeta(delta) = b(delta)/2 - i*phi(delta)``, where ``b`` is the optical
depth and ``phi`` the phase shift, so that the transmitted amplitude factor is
``exp(-zeta)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.constants import k as BOLTZMANN
from scipy.special import wofz

from .errors import DomainError

__all__ = [
    "DopplerMode",
    "MediumParams",
    "ComplexResponse",
    "PRESETS",
    "response_two_level",
    "response_three_level",
    "response_linearized",
    "response",
    "zeta",
    "transfer",
    "group_delay",
    "flash_time_scale",
    "delta_pi",
    "doppler_average",
    "doppler_width",
]

RB87_MASS = 1.443e-25

#: Named parameter sets.  Values are physical constants only; optical depth
#: and control field are always chosen by the caller.
PRESETS = {
    "rubidium-d2": {
        "gamma21": 2 * math.pi * 6e6,
        "wave_number_k": 2 * math.pi * 1.28e6,
        "atom_mass": RB87_MASS,
    },
}


class DopplerMode(str, enum.Enum):
    """How an atom's velocity enters the susceptibility.

    ``SIMPLE_SHIFT`` replaces every detuning ``delta`` by ``delta - k v``.
    ``COPROPAGATING`` shifts only the single-photon factors and leaves the
    two-photon detuning untouched, as for co-propagating probe and control
    beams of nearly equal wavelength.
    """

    OFF = "off"
    SIMPLE_SHIFT = "simple_shift"
    COPROPAGATING = "copropagating"


@dataclass(frozen=True)
class MediumParams:
    """Constants of the atomic slab.

    Parameters
    ----------
    b0 : float
        Resonant single-photon optical depth.
    gamma31 : float
        Ground-state coherence relaxation rate (``gamma31/2`` is the decay
        rate of the coherence), in units of ``gamma21``.
    omega_c : float
        Control Rabi frequency.  Zero gives a plain two-level medium.
    delta_c : float
        Control detuning.
    gamma21 : float
        Physical excited-state linewidth in rad/s, used for unit conversion.
    wave_number_k : float, optional
        Probe wave number in 1/m.  Only needed for Doppler averaging.
    atom_mass : float, optional
        Atomic mass in kg.  Only needed for Doppler averaging.
    temperature : float
        Temperature in K.  Zero disables Doppler averaging.
    doppler_mode : DopplerMode
        Velocity coupling used when ``temperature > 0``.
    doppler_order : int
        Number of Gauss-Hermite nodes when ``doppler_method == "hermite"``.
    doppler_method : {"exact", "hermite"}
        ``exact`` integrates the Gaussian velocity average in closed form
        through the Faddeeva function; ``hermite`` uses Gauss-Hermite nodes.
    """

    b0: float = 200.0
    gamma31: float = 0.0
    omega_c: float = 0.0
    delta_c: float = 0.0
    gamma21: float = 2 * math.pi * 6e6
    wave_number_k: Optional[float] = None
    atom_mass: Optional[float] = None
    temperature: float = 0.0
    doppler_mode: DopplerMode = DopplerMode.SIMPLE_SHIFT
    doppler_order: int = 64
    doppler_method: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "doppler_mode", DopplerMode(self.doppler_mode))
        checks = [
            (self.b0 > 0, "b0 > 0"),
            (self.gamma21 > 0, "gamma21 > 0"),
            (self.gamma31 >= 0, "gamma31 >= 0"),
            (self.omega_c >= 0, "omega_c >= 0"),
            (self.omega_c == 0 or self.omega_c**2 > self.b0 / 1e300,
             "omega_c large enough for a finite EIT delay"),
            (self.temperature >= 0, "temperature >= 0"),
            (self.doppler_order >= 2, "doppler_order >= 2"),
            (self.doppler_method in ("exact", "hermite"), "doppler_method in {exact, hermite}"),
        ]
        for ok, rule in checks:
            if not ok:
                raise DomainError(f"invalid medium: {rule}")
        for name in ("b0", "gamma31", "omega_c", "delta_c", "temperature"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"invalid medium: {name} must be finite")
        if self.doppler_active and (not self.wave_number_k or not self.atom_mass):
            raise DomainError(
                "invalid medium: temperature > 0 requires wave_number_k and atom_mass"
            )

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "MediumParams":
        try:
            values = dict(PRESETS[name])
        except KeyError:
            raise DomainError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
        values.update(overrides)
        return cls(**values)

    @property
    def is_three_level(self) -> bool:
        return self.omega_c > 0

    @property
    def doppler_active(self) -> bool:
        return self.temperature > 0 and self.doppler_mode is not DopplerMode.OFF

    def two_level(self) -> "MediumParams":
        """Copy of this medium with the control field removed."""
        return replace(self, omega_c=0.0)

    def replace(self, **changes) -> "MediumParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ComplexResponse:
    """Complex opacity ``zeta`` at one or many detunings."""

    zeta: complex | np.ndarray

    @property
    def optical_depth(self):
        """Intensity optical depth ``b(delta) = 2 Re zeta``."""
        return 2.0 * np.real(self.zeta)

    @property
    def phase(self):
        """Phase shift ``phi(delta) = -Im zeta``."""
        return -np.imag(self.zeta)

    @property
    def transmission(self):
        """Amplitude transfer factor ``exp(-zeta)``."""
        return np.exp(-self.zeta)


# -- raw kernels -------------------------------------------------------------
#
# These return bare complex numbers or arrays and accept a velocity shift
# ``shift = k v / gamma21``.  Python scalars stay Python complex, which keeps
# the quadrature callbacks cheap.


def _zeta_two_level(delta, b0, shift=0.0):
    return 0.25j * b0 / (delta - shift + 0.5j)


def _zeta_three_level(delta, b0, omega_c, delta_c, gamma31, shift=0.0, two_photon_shift=True):
    single = delta - shift + 0.5j
    two_photon = (delta - shift if two_photon_shift else delta) - delta_c + 0.5j * gamma31
    return 0.25j * b0 * two_photon / (single * two_photon - 0.25 * omega_c * omega_c)


# -- public operations -------------------------------------------------------


def response_two_level(delta, params: MediumParams, *, doppler_shift=0.0) -> ComplexResponse:
    """Opacity of the bare probe transition (control field ignored).

    ``zeta = (b0/2) (gamma21/2) [gamma21/2 + i delta] / (delta**2 + gamma21**2/4)``,
    so that ``exp(-zeta(0)) = exp(-b0/2)``.
    """
    return ComplexResponse(_zeta_two_level(delta, params.b0, doppler_shift))


def response_three_level(delta, params: MediumParams, *, doppler_shift=0.0) -> ComplexResponse:
    """Opacity of the Lambda system dressed by the control field.

    Falls back to :func:`response_two_level` when ``omega_c == 0`` so the two
    models agree bit for bit in that limit.
    """
    if not params.is_three_level:
        return response_two_level(delta, params, doppler_shift=doppler_shift)
    tp = params.doppler_mode is not DopplerMode.COPROPAGATING
    return ComplexResponse(
        _zeta_three_level(
            delta, params.b0, params.omega_c, params.delta_c, params.gamma31, doppler_shift, tp
        )
    )


def response_linearized(delta_p, params: MediumParams) -> ComplexResponse:
    """First-order expansion of the EIT response in ``delta_p`` and ``gamma31``.

    Returns a constant absorption ``b0 gamma31 / (2 omega_c**2)`` and a phase
    growing linearly with slope ``tau_EIT``.  Only trusted well inside the
    transparency window, hence the domain check.
    """
    if not params.is_three_level:
        raise DomainError("linearized response needs omega_c > 0")
    if params.delta_c != 0:
        raise DomainError("linearized response assumes delta_c = 0")
    limit = 0.1 * min(params.omega_c, 1.0)
    if np.any(np.abs(delta_p) > limit):
        raise DomainError(f"|delta_p| must not exceed {limit:g} for the linearization")
    tau = group_delay(params)
    re = 0.5 * tau * params.gamma31
    return ComplexResponse(re - 1j * tau * np.asarray(delta_p, dtype=float)[()])


def group_delay(params: MediumParams) -> float:
    """Slow-light delay ``b0 gamma21 / omega_c**2`` in units of ``1/gamma21``."""
    if not params.is_three_level:
        raise DomainError("group delay is undefined for omega_c = 0")
    return params.b0 / params.omega_c**2


def flash_time_scale(params: MediumParams) -> float:
    """Order-of-magnitude cooperative decay time ``1/(b0 gamma21)``."""
    return 1.0 / params.b0


def delta_pi(params: MediumParams) -> float:
    """Probe detuning of the first constructive fringe, ``pi omega_c**2 / b0``."""
    if not params.is_three_level:
        raise DomainError("delta_pi is undefined for omega_c = 0")
    return math.pi * params.omega_c**2 / params.b0


def doppler_width(params: MediumParams) -> float:
    """One-dimensional Doppler width ``k sigma_v`` in units of ``gamma21``."""
    if params.temperature == 0:
        return 0.0
    if not params.wave_number_k or not params.atom_mass:
        raise DomainError("Doppler width needs wave_number_k and atom_mass")
    sigma_v = math.sqrt(BOLTZMANN * params.temperature / params.atom_mass)
    return params.wave_number_k * sigma_v / params.gamma21


@lru_cache(maxsize=16)
def _hermite_rule(order: int):
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / math.sqrt(2 * math.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gauss_pole(z, sigma):
    """``E[1/(z - s)]`` for ``s ~ N(0, sigma**2)`` and ``Im z > 0``."""
    return -1j * math.sqrt(math.pi / 2) / sigma * wofz(z / (sigma * math.sqrt(2)))


def _gauss_pole2(z, sigma):
    """``E[1/(z - s)**2]``, the negative ``z``-derivative of :func:`_gauss_pole`."""
    z = np.asarray(z, dtype=complex)
    u = z / (sigma * math.sqrt(2))
    big = np.abs(u) > 30
    # Moment series sum (n+1) E[s^n] / z^(n+2); the direct form cancels at large |u|.
    zs = np.where(big, z, 1.0)
    r = sigma**2 / zs**2
    series = (1 + r * (3 + r * (15 + r * (105 + 945 * r)))) / zs**2
    us = np.where(big, 1.0, u)
    dw = -2 * us * wofz(us) + 2j / math.sqrt(math.pi)
    direct = 1j * math.sqrt(math.pi / 2) / sigma * dw / (sigma * math.sqrt(2))
    return np.where(big, series, direct)[()]


def _exact_average(params: MediumParams):
    """Closed-form Gaussian average of ``zeta`` over the velocity shift.

    In either Doppler mode ``zeta`` is a rational function of the shift
    ``s = k v`` with at most two poles in the lower half plane, and the
    Gaussian average of one pole is a Faddeeva function.
    """
    sigma = doppler_width(params)
    b0 = params.b0
    if not params.is_three_level:
        return lambda delta: 0.25j * b0 * _gauss_pole(np.asarray(delta) + 0.5j, sigma)
    om2 = params.omega_c**2
    a = -params.delta_c + 0.5j * params.gamma31
    if params.doppler_mode is DopplerMode.COPROPAGATING:
        def averaged(delta):
            delta = np.asarray(delta, dtype=float)
            d = delta + a
            with np.errstate(divide="ignore", invalid="ignore"):
                z0 = delta + 0.5j - 0.25 * om2 / d
                out = 0.25j * b0 * _gauss_pole(z0, sigma)
            return np.where(d == 0, 0.0, out)

        return averaged
    # (x + a) / ((x - p1)(x - p2)) with x = delta - s, as a divided difference.
    p1, p2 = np.roots([1.0, 0.5j + a, 0.5j * a - 0.25 * om2])
    scale = max(sigma, abs(p1.imag), abs(p2.imag))

    def averaged(delta):
        delta = np.asarray(delta, dtype=float)
        if abs(p1 - p2) > 1e-5 * scale:
            f1 = (p1 + a) * _gauss_pole(delta - p1, sigma)
            f2 = (p2 + a) * _gauss_pole(delta - p2, sigma)
            frac = (f1 - f2) / (p1 - p2)
        else:
            p = 0.5 * (p1 + p2)
            frac = _gauss_pole(delta - p, sigma) + (p + a) * _gauss_pole2(delta - p, sigma)
        return 0.25j * b0 * frac

    return averaged


def doppler_average(
    base: Callable[..., ComplexResponse], params: MediumParams
) -> Callable[[object], ComplexResponse]:
    """Average a response over a one-dimensional Maxwell-Boltzmann distribution.

    The complex susceptibility (hence ``zeta``) is averaged, not the
    transmitted amplitude.  The integral over velocities uses Gauss-Hermite
    quadrature with ``params.doppler_order`` nodes.  At zero temperature the
    base response is returned unchanged.

    With ``params.doppler_method == "exact"`` and one of the built-in
    responses as ``base`` the average is evaluated in closed form; otherwise
    ``params.doppler_order`` Gauss-Hermite nodes are used.

    Parameters
    ----------
    base : callable
        :func:`response_two_level` or :func:`response_three_level`, or any
        function with the same signature accepting ``doppler_shift``.
    params : MediumParams
    """
    if params.temperature == 0 or params.doppler_mode is DopplerMode.OFF:
        return lambda delta: base(delta, params)
    if params.doppler_method == "exact" and base in (response_two_level, response_three_level):
        if base is response_two_level:
            params = params.two_level()
        exact = _exact_average(params)
        return lambda delta: ComplexResponse(exact(delta)[()])
    width = doppler_width(params)
    nodes, weights = _hermite_rule(params.doppler_order)
    shifts = width * nodes

    def averaged(delta) -> ComplexResponse:
        if np.ndim(delta) == 0:
            z = base(delta, params, doppler_shift=shifts).zeta
            return ComplexResponse(complex(np.dot(weights, z)))
        delta = np.asarray(delta, dtype=float)
        acc = np.zeros(delta.shape, dtype=complex)
        for s, w in zip(shifts, weights):
            acc += w * base(delta, params, doppler_shift=s).zeta
        return ComplexResponse(acc)

    return averaged


def response(delta, params: MediumParams) -> ComplexResponse:
    """Full response of the medium, Doppler averaged when the medium is warm."""
    base = response_three_level if params.is_three_level else response_two_level
    if params.doppler_active:
        return doppler_average(base, params)(delta)
    return base(delta, params)


def zeta(delta, params: MediumParams):
    """Bare complex opacity (``response(delta, params).zeta``)."""
    return response(delta, params).zeta


def transfer(delta, params: MediumParams):
    """Amplitude transfer function ``H(delta) = exp(-zeta(delta))``."""
    return np.exp(-zeta(delta, params))


def scalar_zeta_function(params: MediumParams) -> Callable[[float], complex]:
    """Fast scalar ``delta -> zeta`` callable for quadrature callbacks."""
    if params.doppler_active:
        avg = doppler_average(
            response_three_level if params.is_three_level else response_two_level, params
        )
        return lambda d: avg(d).zeta
    if params.is_three_level:
        b0, om, dc, g31 = params.b0, params.omega_c, params.delta_c, params.gamma31
        return lambda d: _zeta_three_level(d, b0, om, dc, g31)
    b0 = params.b0
    return lambda d: _zeta_two_level(d, b0)
