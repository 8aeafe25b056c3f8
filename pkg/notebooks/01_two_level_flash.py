"""
Flash at extinction in a two-level medium
=========================================

A square probe pulse crosses an opaque two-level slab (b0 = 200).  While the
probe is on almost nothing gets through; when it is switched off the forward
scattered field is left alone and shows up as a bright flash that decays on
the cooperative time scale tau_f = 1/b0.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eitflash import MediumParams, PulseKind, PulseSpec, flash_time_scale, steady_state, transmit_sample

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

medium = MediumParams(b0=200.0)
tau_f = flash_time_scale(medium)

# Step-on (precursor) and step-off (flash) responses near the edge.
t = np.linspace(-5 * tau_f, 40 * tau_f, 400)
on = transmit_sample(PulseSpec(PulseKind.STEP_ON), medium, t)
off = transmit_sample(PulseSpec(PulseKind.STEP_OFF), medium, t)

# The two are complementary: their sum is the steady transmission H(0).
print("max |E_on + E_off - H| =", np.max(np.abs(on + off - steady_state(medium, 0.0))))
print("I(0+) =", abs(transmit_sample(PulseSpec(PulseKind.STEP_OFF), medium, tau_f / 100)) ** 2)

fig, ax = plt.subplots(figsize=(6, 3.5))
ax.semilogy(t / tau_f, np.abs(on) ** 2 + 1e-30, label="probe switched on")
ax.semilogy(t / tau_f, np.abs(off) ** 2 + 1e-30, label="probe switched off")
ax.set_xlabel(r"$t/\tau_f$")
ax.set_ylabel(r"$I/I_i$")
ax.set_ylim(1e-12, 2)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "01_two_level_flash.png"), dpi=120)
