"""Shift a little duty between modules and watch where the current goes.

Module 1 gets +0.05, module 3 gets -0.05. The string voltage, and therefore
the load, does not notice.
"""
import numpy as np

from pulsedrive.circuit import simulate
from pulsedrive.metrics import harmonic_amplitudes
from pulsedrive.runner import bundled
from pulsedrive.scenario import load_scenario
from pulsedrive.studies import module_mean_currents


def run(name):
    sc = load_scenario(bundled(name))
    tr = simulate(sc)
    mods, i_dc = module_mean_currents(tr)
    k0, k1 = tr.index(sc.settle_time), tr.index(sc.duration)
    i1 = harmonic_amplitudes(tr.i_a[k0:k1], sc.reference.frequency, 1 / tr.dt_trace, 1)[1]
    return mods, i_dc, i1


base, i_dc, i1_base = run("bench_passive.ini")
shifted, _, i1 = run("balancing.ini")

print("module  mean A (even)  mean A (offsets)  change % of i_dc")
for k in range(len(base)):
    print(f"{k + 1:6d}  {base[k]:13.3f}  {shifted[k]:16.3f}  {100 * (shifted[k] - base[k]) / i_dc:+8.2f}")
print(f"\ni_dc mean {i_dc:.3f} A")
print(f"phase current fundamental {i1_base:.4f} A -> {i1:.4f} A "
      f"({100 * (i1 / i1_base - 1):+.4f}%)")
print("sum of changes", np.round(np.sum(shifted - base), 4), "A")
