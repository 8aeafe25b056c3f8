"""
Square-wave modulation regimes
==============================

Under periodic square modulation with period T the fringe pattern depends on
how T compares with the medium time scales.  Slow modulation (T >> tau_EIT)
reproduces the single-pulse fringes.  Fast modulation (T < tau_f) puts every
sideband outside the medium response, so only the carrier sees the EIT phase
and the transmitted pulse train flips sign at delta_pi.  In between, the
fringe contrast oscillates with T.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eitflash import (
    MediumParams,
    PulseKind,
    PulseSpec,
    contrast_curve,
    delta_pi,
    fast_regime_closed_form,
    group_delay,
    modulation_map,
    periodic_amplitude,
)

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

medium = MediumParams(b0=200.0, omega_c=0.5)
dpi = delta_pi(medium)
periods = np.geomspace(1e-3, 1e3 * group_delay(medium), 13)
mmap = modulation_map(medium, periods, np.linspace(0, 2 * dpi, 41))
i_max, contrast = contrast_curve(mmap)
for T, top, c in zip(periods, i_max, contrast):
    print(f"T={T:10.3g}: I_max={top:6.3f}  contrast={c:.4f}")

# Fast regime: numerical trace against |E_i + (exp(i phi) - 1)/2|**2.
T = 1e-3
t = np.linspace(-T, T, 400)
fig, axes = plt.subplots(1, 2, figsize=(8, 3.2), sharey=True)
for ax, dp in zip(axes, (0.0, dpi)):
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=T, delta_p=dp)
    ax.plot(t / T, np.abs(periodic_amplitude(pulse, medium, t)) ** 2, label="numerical")
    ax.plot(t / T, fast_regime_closed_form(medium, dp, t, pulse), "--", label="closed form")
    ax.set_title(rf"$\delta_p = {dp / dpi:g}\,\delta_\pi$")
    ax.set_xlabel(r"$t/T$")
axes[0].set_ylabel(r"$I/I_i$")
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "05_fast_regime.png"), dpi=120)
