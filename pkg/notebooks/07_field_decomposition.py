"""
Incident, scattered and EIT fields
==================================

The transmitted field splits into the incident field, the field scattered by
the same slab without control light, and the remaining EIT part.  On steady
state their relative phase follows delta_p * tau_EIT - pi, which is what
sets the fringe positions.
"""
import math

import numpy as np

from eitflash import (
    MediumParams,
    delta_pi,
    extract_phases,
    phase_difference_formula,
    steady_components,
    wrap_phase,
)

medium = MediumParams(b0=200.0, omega_c=0.5)
dpi = delta_pi(medium)
for frac in np.linspace(-2, 2, 9):
    fields = steady_components(medium, frac * dpi)
    _, _, diff = extract_phases(fields, math.inf)
    formula = phase_difference_formula(medium, frac * dpi)
    print(f"delta_p={frac:+.1f} delta_pi: phi_EIT - phi_s = {diff:+.4f}  formula {formula:+.4f}  "
          f"difference {float(wrap_phase(diff - formula)):+.4f}")
