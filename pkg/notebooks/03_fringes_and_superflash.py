"""
Interference fringes and the superflash
=======================================

Detuning the probe from two-photon resonance gives the EIT field a phase
delta_p * tau_EIT relative to the scattered field.  The flash intensity I(0+)
then oscillates with delta_p; at delta_pi = pi/tau_EIT the two fields add up
and the flash exceeds the incident intensity (the superflash).  Ground state
dephasing gamma31 lowers every maximum.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eitflash import MediumParams, delta_pi, first_fringe_maximum, fringe_scan

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

x = np.linspace(-4, 4, 321)
fig, ax = plt.subplots(figsize=(6, 3.5))
for b0 in (100.0, 200.0, 400.0):
    medium = MediumParams(b0=b0, omega_c=0.5)
    dpi = delta_pi(medium)
    scan = fringe_scan(medium, detunings=x * dpi)
    d_max, i_max = first_fringe_maximum(medium)
    print(f"b0={b0:5.0f}: first maximum at {d_max / dpi:.3f} delta_pi, I(0+)={i_max:.3f}")
    ax.plot(x, scan.i0plus, lw=0.9, label=f"$b_0={b0:g}$")

lossy = MediumParams(b0=200.0, omega_c=0.5, gamma31=1e-3)
scan = fringe_scan(lossy, detunings=x * delta_pi(lossy))
ax.plot(x, scan.i0plus, "k:", lw=0.9, label=r"$b_0=200,\ \gamma_{31}=10^{-3}$")
ax.set_xlabel(r"$\delta_p/\delta_\pi$")
ax.set_ylabel(r"$I(0^+)/I_i$")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "03_fringes_and_superflash.png"), dpi=120)
