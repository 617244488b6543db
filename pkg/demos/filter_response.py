"""Gain and phase of the dc-link L-C filter, and its step response."""
import numpy as np

from pulsedrive.backend import BackendConfig
from pulsedrive.circuit import FilterParams, filter_frequency_response, simulate_dc_stage

filt = FilterParams(30e-6, 60e-6, r_eq=3.0)
print(f"resonance {filt.f_res:.1f} Hz")
f = np.array([50, 300, 600, 1000, 2000, 3000, 5000, 10_000.0])
gain, phase = filter_frequency_response(filt, f)
for fi, g, ph in zip(f, gain, phase):
    print(f"{fi:7.0f} Hz  gain {g:7.4f}  phase {ph:8.3f} deg")

# an undamped step from 0 to 320 V swings to twice the step
tr = simulate_dc_stage("chb", 1.0, BackendConfig.uniform(8, 40.0, 5e3), FilterParams(30e-6, 60e-6),
                       0.002, 1e-8, decimation=100)
v = tr.v_dc2 - 320.0
up = np.nonzero((v[:-1] < 0) & (v[1:] >= 0))[0]
print(f"\nstep response: peak {tr.v_dc2.max():.1f} V, ring period {np.mean(np.diff(tr.t[up])) * 1e6:.1f} us")
