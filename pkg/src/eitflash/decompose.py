"""Split the transmitted field into incident, scattered and EIT parts.

``E = E_i + E_s + E_EIT``, where ``E_s`` is the forward-scattered field of the
same medium with the control field removed and ``E_EIT`` is whatever remains.
The split is a definition, so it is done by subtraction on traces computed
with identical numerics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatchError, MagnitudeUnderflowError
from .medium import MediumParams, group_delay
from .propagate import FieldTrace, incident_trace, steady_trace, transmit_like
from .pulse import PulseSpec

__all__ = [
    "DecomposedFields",
    "decompose",
    "steady_components",
    "phase_difference_formula",
    "extract_phases",
    "wrap_phase",
]

MAGNITUDE_FLOOR = 1e-6


@dataclass(frozen=True)
class DecomposedFields:
    """Incident, two-level scattered and EIT components of one trace.

    For a two-level medium ``e_eit`` is an all-zero trace.
    """

    total: FieldTrace
    e_i: FieldTrace
    e_s: FieldTrace
    e_eit: FieldTrace

    def components(self):
        """``(name, trace)`` pairs in export order."""
        return [("total", self.total), ("incident", self.e_i), ("scattered", self.e_s),
                ("eit", self.e_eit)]

    def reconstruct(self) -> np.ndarray:
        return self.e_i.samples + self.e_s.samples + self.e_eit.samples


def _derived(trace: FieldTrace, samples, medium) -> FieldTrace:
    return FieldTrace(trace.t0, trace.dt, samples, trace.pulse, medium, trace.backend,
                      trace.grid, trace.method)


def decompose(total: FieldTrace, medium: Optional[MediumParams] = None,
              pulse: Optional[PulseSpec] = None) -> DecomposedFields:
    """Decompose a transmitted trace.

    Parameters
    ----------
    total : FieldTrace
        Transmitted trace for ``medium``.
    medium, pulse : optional
        Must match the ones stored in ``total`` if given.

    Notes
    -----
    The two-level copy is recomputed with the backend, grid and time window of
    ``total``, so ``e_s`` does not depend on the control field at all.
    """
    medium = medium if medium is not None else total.medium
    pulse = pulse if pulse is not None else total.pulse
    if total.medium is not None and total.medium != medium:
        raise GridMismatchError("medium differs from the one the trace was computed for")
    if pulse != total.pulse:
        raise GridMismatchError("pulse differs from the one the trace was computed for")
    e_i = incident_trace(total)
    two = transmit_like(total, medium.two_level()) if medium.is_three_level else total
    if not two.aligned_with(total):
        raise GridMismatchError("two-level trace does not share the sampling of the input")
    e_s = _derived(total, two.samples - e_i.samples, medium.two_level())
    if medium.is_three_level:
        e_eit = _derived(total, total.samples - two.samples, medium)
    else:
        e_eit = _derived(total, np.zeros(len(total), dtype=complex), medium)
    return DecomposedFields(total, e_i, e_s, e_eit)


def steady_components(medium: MediumParams, delta_p: float) -> DecomposedFields:
    """Decomposition of the monochromatic (steady-state) transmission."""
    return decompose(steady_trace(medium, delta_p), medium)


def wrap_phase(phi):
    """Wrap angles to ``(-pi, pi]``."""
    phi = np.asarray(phi, dtype=float)
    out = -np.mod(-phi + math.pi, 2 * math.pi) + math.pi
    return out[()]


def phase_difference_formula(medium: MediumParams, delta_p: float) -> float:
    """Small-detuning estimate ``delta_p * tau_EIT - pi`` of ``phi_EIT - phi_s``."""
    return float(wrap_phase(delta_p * group_delay(medium) - math.pi))


def extract_phases(fields: DecomposedFields, t: float):
    """Phases of ``e_s`` and ``e_eit`` at ``t`` and their wrapped difference.

    The difference is the argument of ``e_eit / e_s``, which avoids branch cuts.

    Raises
    ------
    MagnitudeUnderflowError
        If either field is smaller than ``1e-6`` at ``t``.
    """
    j = fields.e_s.index_of(t) if len(fields.e_s) > 1 else 0
    e_s = complex(fields.e_s.samples[j])
    e_eit = complex(fields.e_eit.samples[j])
    for name, value in (("e_s", e_s), ("e_eit", e_eit)):
        if abs(value) < MAGNITUDE_FLOOR:
            raise MagnitudeUnderflowError(f"|{name}|={abs(value):.2e} below {MAGNITUDE_FLOOR:g}")
    phi_s = float(wrap_phase(np.angle(e_s)))
    phi_eit = float(wrap_phase(np.angle(e_eit)))
    return phi_s, phi_eit, float(wrap_phase(np.angle(e_eit / e_s)))
