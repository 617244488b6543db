"""Ramp the output from standstill into a motor-like load.

The reference amplitude and the back-emf rise together over 200 ms. The
backend tracks the growing envelope, so the string only ever sees the voltage
the motor needs.
"""
import numpy as np

from pulsedrive.circuit import simulate
from pulsedrive.runner import bundled
from pulsedrive.scenario import load_scenario

sc = load_scenario(bundled("spinup.ini"))
tr = simulate(sc)
step = int(round(0.02 / tr.dt_trace))
print("  t ms   v_dc2 mean   i_a rms   modules in series")
for k in range(0, len(tr.t) - step, step):
    sl = slice(k, k + step)
    print(f"{tr.t[k] * 1e3:6.0f}  {tr.v_dc2[sl].mean():10.1f}  {np.sqrt(np.mean(tr.i_a[sl] ** 2)):8.1f}"
          f"  {tr.n_series[sl].mean():8.2f}")
