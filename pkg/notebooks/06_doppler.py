"""
Doppler broadening
==================

Thermal motion shifts each atom's resonance by k v.  If the shift also moves
the two-photon detuning (simple_shift) the EIT window is smeared over the
Doppler width, which is already far wider than delta_pi at 0.1 K, and the
fringes vanish.  If the two-photon detuning is Doppler free (copropagating
beams) only the single-photon line broadens and the fringes degrade slowly,
more slowly at larger b0.  The average is exact, through the Faddeeva function.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eitflash import MediumParams, delta_pi, doppler_fringe_scan, doppler_width, fringe_metrics

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

fig, axes = plt.subplots(1, 2, figsize=(8, 3.2), sharey=True)
for ax, mode in zip(axes, ("simple_shift", "copropagating")):
    base = MediumParams.from_preset("rubidium-d2", b0=200.0, omega_c=0.5, doppler_mode=mode)
    x = np.linspace(0, 3, 61)
    for scan in doppler_fringe_scan(base, [0.0, 0.1, 1.0, 50.0], x * delta_pi(base)):
        m = fringe_metrics(scan)
        T = scan.medium.temperature
        print(f"{mode:>13} T={T:5g} K  k sigma_v={doppler_width(scan.medium):6.2f}  "
              f"I_max={m.i_max:.3f}  contrast={m.contrast:.4f}")
        ax.plot(x, scan.i0plus, lw=0.9, label=f"{T:g} K")
    ax.set_title(mode)
    ax.set_xlabel(r"$\delta_p/\delta_\pi$")
axes[0].set_ylabel(r"$I(0^+)/I_i$")
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "06_doppler.png"), dpi=120)
