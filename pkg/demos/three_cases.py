"""Loss breakdown of the three drive options at 200 A peak output current.

Run from the repository root:

    python3 demos/three_cases.py
"""
from pulsedrive.runner import bundled, run_comparison
from pulsedrive.scenario import load_scenario

base = load_scenario(bundled("table2.ini"))
rows = run_comparison(base, ms=[0.95, 0.75, 0.5], pfs=[0.9, 0.6])

print(f"{'case':9} {'m':>5} {'pf':>4}  {'IGBT cond':>9} {'IGBT sw':>8} {'FET cond':>8} "
      f"{'FET sw':>7} {'total':>7}  {'THD %':>6} {'comm/T':>7}")
for r in rows:
    print(f"{r.strategy:9} {r.m:5.2f} {r.pf:4.1f}  {r.cond_igbt_w:9.1f} {r.sw_igbt_w:8.1f} "
          f"{r.cond_fet_w:8.1f} {r.sw_fet_w:7.2f} {r.total_loss_w:7.1f}  "
          f"{100 * r.thd_ia:6.2f} {r.commutations_frontend:7.0f}")

# how much of the inverter-only loss is left
for k in range(0, len(rows), 3):
    pr, _, sv = rows[k:k + 3]
    print(f"m={pr.m:.2f} pf={pr.pf:.1f}: proposed / svpwm = {pr.total_loss_w / sv.total_loss_w:.3f}")
