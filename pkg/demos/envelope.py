"""Walk one fundamental period and show how the string voltage and the three
inverter legs share the work.

The dc link follows the largest line voltage, so it pulsates at six times the
output frequency between 1.5 and sqrt(3) times the phase amplitude. In each
sector two legs are pinned to the rails and only the third modulates.
"""
import numpy as np

from pulsedrive.reference import (ReferenceState, envelope_dc_ref, frontend_mod_indices,
                                  gen_three_phase_refs, sector_index)

ref = ReferenceState(amplitude=1.0, frequency=50.0)
theta = np.linspace(0, 2 * np.pi, 25)[:-1]
p = gen_three_phase_refs(ref, theta)
env = envelope_dc_ref(p)
(ma, mb, mc), _ = frontend_mod_indices(p)
sec = sector_index(p)

print(" deg  sector  envelope   m_a    m_b    m_c")
for k in range(len(theta)):
    print(f"{np.degrees(theta[k]):4.0f}  {sec[k]:5d}   {env[k]:7.4f}  "
          f"{ma[k]:5.3f}  {mb[k]:5.3f}  {mc[k]:5.3f}")

fine = envelope_dc_ref(gen_three_phase_refs(ref, np.linspace(0, 2 * np.pi, 60_000, endpoint=False)))
spec = np.abs(np.fft.rfft(fine)) / len(fine)
print(f"\nmin {fine.min():.6f}  max {fine.max():.6f}")
print("strongest ripple harmonic:", int(np.argmax(spec[1:]) + 1))
