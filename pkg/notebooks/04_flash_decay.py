"""
Cooperative decay of the flash
==============================

The flash decays faster in denser media.  A straight-line fit of ln I over
(tau_f/10, 3 tau_f) after switch-off gives a decay time proportional to 1/b0.
"""
import numpy as np

from eitflash import MediumParams, fit_flash_decay, flash_decay_trace

b0s = np.array([50.0, 100.0, 200.0, 400.0])
taus = np.array([fit_flash_decay(flash_decay_trace(MediumParams(b0=b))) for b in b0s])
for b, tau in zip(b0s, taus):
    print(f"b0={b:5.0f}: tau_fit = {tau:.4e}   b0 * tau_fit = {b * tau:.3f}")
print("log-log slope:", np.polyfit(np.log(b0s), np.log(taus), 1)[0])
