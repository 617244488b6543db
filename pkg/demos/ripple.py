"""Switching ripple on the dc link: closed form against simulation.

An eight-module string at 5 kHz per module looks like a 40 kHz converter from
the filter, but each step is one module voltage instead of the whole string.
At integer m_dc*N the level does not move at all.
"""
import numpy as np

from pulsedrive.backend import BackendConfig
from pulsedrive.circuit import FilterParams
from pulsedrive.metrics import ripple_analytic
from pulsedrive.studies import measured_ripple

cfg = BackendConfig.uniform(8, 40.0, 5e3)
filt = FilterParams(30e-6, 60e-6)

print(" m_dc   closed form   sim pk-pk   sim / 2    buck (40 kHz)")
for m in np.round(np.arange(0.25, 1.0, 0.0625), 4):
    a = ripple_analytic("chb", 40.0, 8, m, filt.L, filt.C, 5e3)
    b = ripple_analytic("buck", 40.0, 8, m, filt.L, filt.C, 40e3)
    pp = measured_ripple(m, cfg, filt)
    print(f"{m:6.4f}   {a:8.4f} V   {pp:7.4f} V  {pp / 2:7.4f} V   {b:7.4f} V")
