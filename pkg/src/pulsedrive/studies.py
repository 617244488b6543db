"""Measurements built on backend-only and full-drive runs."""
from __future__ import annotations

import numpy as np

from .backend import BackendConfig
from .circuit import CUM_MOD, CUM_Q_L, FilterParams, SimTrace, simulate_dc_stage
from .metrics import dc_stage_sur, switching_ripple


def ripple_dt(cfg: BackendConfig) -> float:
    # 200 steps per string switching period, then a factor 4 for the edges
    return 1.0 / (200 * cfg.n_mdl * cfg.f_mdl) / 4


def measured_ripple(m_dc: float, cfg: BackendConfig, filt: FilterParams, r_load: float = 3.0,
                    settle: float = 10e-3, window: float = 2e-3) -> float:
    """Peak-to-peak switching ripple of v_dc2 for a constant-duty CHB string.

    The run starts at the averaged operating point so the L-C transient does
    not need to die out; ``settle`` and ``window`` are whole carrier periods.
    """
    v0 = m_dc * cfg.v_total
    tr = simulate_dc_stage("chb", m_dc, cfg, filt, settle + window, ripple_dt(cfg), r_load,
                           x0=(v0 / r_load, v0))
    k0 = int(round(settle / tr.dt_trace))
    return switching_ripple(tr.v_dc2[k0:-1], 1.0 / tr.dt_trace)


def sur_curve(kind: str, m_grid, cfg: BackendConfig, filt: FilterParams, r_load: float = 3.0,
              settle: float = 4e-3, window: float = 2e-3) -> np.ndarray:
    """Switch utilisation of a CHB string or a buck stage over ``m_grid``."""
    dt = ripple_dt(cfg)
    out = []
    for m in m_grid:
        v0 = m * cfg.v_total
        tr = simulate_dc_stage(kind, m, cfg, filt, settle + window, dt, r_load,
                               decimation=4, x0=(v0 / r_load, v0))
        out.append(dc_stage_sur(tr, cfg, kind, settle, settle + window))
    return np.array(out)


def module_mean_currents(trace: SimTrace, t0: float | None = None,
                         t1: float | None = None) -> tuple[np.ndarray, float]:
    """Mean battery current of each module and the mean dc-link current."""
    sc = trace.scenario
    t0 = sc.settle_time if t0 is None else t0
    t1 = sc.duration if t1 is None else t1
    n = sc.backend.n_mdl
    T = t1 - t0
    mods = np.array([trace.window_integral(CUM_MOD + 2 * n + k, t0, t1) for k in range(n)]) / T
    return mods, trace.window_integral(CUM_Q_L, t0, t1) / T
