"""Loss, distortion, ripple and switch-utilisation metrics.

Device losses use a datasheet-point model: conduction ``v_on0*i_avg +
r_on*i_rms**2`` per device and switching energies scaled linearly in blocked
voltage and current about the reference point ``(v_ref, i_ref)``. The default
parameter sets are representative values for the two device classes in the
comparison (a 1200 V / 300 A IGBT4 half-bridge and a 60 V / 0.75 mOhm FET)
and can be overridden per scenario.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .pwm import DeviceClass, as_event_array, switching_counts
from .reference import Strategy


class WindowMismatch(ValueError):
    """The analysis window does not span an integer number of periods."""


class NonIntegerWindow(UserWarning):
    pass


class ZeroStress(ValueError):
    """No switch conducts, so the utilisation ratio is undefined."""


@dataclass(frozen=True)
class DeviceLossParams:
    cls: DeviceClass
    v_on0: float
    r_on: float
    e_on: float
    e_off: float
    e_rr: float
    v_ref: float
    i_ref: float

    def validate(self, tag: str = "device") -> list[str]:
        errors = []
        for name in ("v_on0", "r_on", "e_on", "e_off", "e_rr"):
            if not getattr(self, name) >= 0:
                errors.append(f"{tag}.{name} must be >= 0")
        for name in ("v_ref", "i_ref"):
            if not getattr(self, name) > 0:
                errors.append(f"{tag}.{name} must be > 0")
        if self.cls is DeviceClass.FET and self.v_on0 != 0:
            errors.append(f"{tag}.v_on0 must be 0 for a FET")
        return errors


# 1200 V / 300 A IGBT4 half-bridge at elevated junction temperature
IGBT_DEFAULT = DeviceLossParams(DeviceClass.IGBT, v_on0=0.75, r_on=3.5e-3, e_on=30e-3,
                                e_off=40e-3, e_rr=25e-3, v_ref=600.0, i_ref=300.0)
# 60 V / 300 A, 0.75 mOhm FET
FET_DEFAULT = DeviceLossParams(DeviceClass.FET, v_on0=0.0, r_on=0.75e-3, e_on=0.10e-3,
                               e_off=0.10e-3, e_rr=0.02e-3, v_ref=30.0, i_ref=100.0)


def conduction_loss(device: DeviceLossParams, i_avg: float, i_rms: float) -> float:
    """Average conduction loss of one device.

    ``i_avg`` and ``i_rms`` are taken over the whole window with the current
    counted as zero while the device is off.
    """
    return device.v_on0 * i_avg + device.r_on * i_rms * i_rms


def event_energies(events, device: DeviceLossParams) -> np.ndarray:
    """Energy of each event (J).

    Hard turn-on and turn-off are charged to the transistor that takes or
    drops the current; when the current flows in the antiparallel diode the
    turn-on is soft and the turn-off is the diode's reverse recovery.
    """
    ev = as_event_array(events)
    i = ev["i_conducted"]
    scale = (ev["v_blocked"] / device.v_ref) * (np.abs(i) / device.i_ref)
    active = i > 0
    e = np.where(ev["turn_on"], np.where(active, device.e_on, 0.0),
                 np.where(active, device.e_off, device.e_rr))
    return e * scale


def switching_loss(events, device: DeviceLossParams, window: tuple[float, float],
                   f0: float | None = None) -> float:
    """Mean switching power of the events of ``device.cls`` inside ``window``."""
    ev = as_event_array(events)
    t0, t1 = window
    if f0 is not None:
        periods = (t1 - t0) * f0
        if abs(periods - round(periods)) > 1e-6 * max(1.0, periods):
            warnings.warn(f"window covers {periods!r} fundamental periods", NonIntegerWindow,
                          stacklevel=2)
    sel = ev[(ev["cls"] == device.cls) & (ev["t"] >= t0) & (ev["t"] < t1)]
    return float(event_energies(sel, device).sum() / (t1 - t0))


def harmonic_amplitudes(x, f0: float, fs: float, harmonics: int) -> np.ndarray:
    """Amplitudes of harmonics 0..H of ``x`` over a whole number of periods."""
    x = np.asarray(x, float)
    n = len(x)
    periods = n * f0 / fs
    p = int(round(periods))
    if p < 1 or abs(periods - p) > 1e-6:
        raise WindowMismatch(f"{n} samples at {fs!r} Hz span {periods!r} periods of {f0!r} Hz")
    spec = np.fft.rfft(x) / n
    bins = np.arange(harmonics + 1) * p
    if bins[-1] >= n // 2:
        raise ValueError(f"harmonic {harmonics} is at or above Nyquist")
    amp = 2.0 * np.abs(spec[bins])
    amp[0] /= 2.0
    return amp


def thd(x, f0: float, fs: float, harmonics: int = 50) -> float:
    """Total harmonic distortion over harmonics 2..``harmonics`` (a fraction)."""
    amp = harmonic_amplitudes(x, f0, fs, harmonics)
    return float(math.sqrt(np.sum(amp[2:] ** 2)) / amp[1])


def max_harmonic(f0: float, fs: float, cap: int) -> int:
    """Highest harmonic not beyond ``cap`` that stays below 0.45 fs."""
    return int(min(cap, math.floor(0.45 * fs / f0)))


def ripple_analytic(topology: str, v_mdl: float, n: int, m_dc, L: float, C: float, f_s: float):
    """Closed-form dc-link ripple of a CHB string or a buck stage.

    The value is the peak deviation of v_dc2 about its mean (half of the
    peak-to-peak swing). For the buck stage ``f_s`` is its own switching
    frequency.
    """
    m_dc = np.asarray(m_dc, float)
    if topology == "chb":
        x = m_dc * n
        out = v_mdl * (np.ceil(x) - x) * (x - np.floor(x)) / (16.0 * L * C * f_s ** 2 * n ** 2)
    elif topology == "buck":
        out = n * v_mdl * (1.0 - m_dc) * m_dc / (16.0 * L * C * f_s ** 2)
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return out if out.ndim else float(out)


def switching_ripple(v, fs: float, cutoff: float = 2e3) -> float:
    """Peak-to-peak of ``v`` after removing content below ``cutoff``."""
    v = np.asarray(v, float)
    spec = np.fft.rfft(v)
    freqs = np.fft.rfftfreq(len(v), 1.0 / fs)
    spec[freqs < cutoff] = 0.0
    hp = np.fft.irfft(spec, len(v))
    return float(hp.max() - hp.min())


def sur(p_load: float, stresses) -> float:
    """Delivered power over total switch stress sum(V_j * I_j)."""
    s = float(sum(v * i for v, i in stresses))
    if not s > 0:
        raise ZeroStress("no switch carries current")
    return p_load / s


def trace_switch_stresses(trace, t0: float, t1: float) -> list[tuple[float, float]]:
    """(rated voltage, rms current) of every switch over ``[t0, t1]``."""
    from .circuit import CUM_LEG_HI2, CUM_LEG_LO2, CUM_MOD

    sc = trace.scenario
    T = t1 - t0
    out = []
    for x in range(3):
        for col in (CUM_LEG_HI2 + x, CUM_LEG_LO2 + x):
            out.append((sc.v_link_max, math.sqrt(max(trace.window_integral(col, t0, t1), 0.0) / T)))
    if sc.strategy is Strategy.PROPOSED:
        n = sc.backend.n_mdl
        for k, v_mdl in enumerate(sc.backend.v_mdl):
            for col in (CUM_MOD + k, CUM_MOD + n + k):
                out.append((float(v_mdl), math.sqrt(max(trace.window_integral(col, t0, t1), 0.0) / T)))
    return out


def dc_stage_sur(dc, cfg, kind: str, t0: float, t1: float) -> float:
    """Utilisation ratio of a backend-only run (see ``simulate_dc_stage``)."""
    k0 = int(round(t0 / dc.dt_trace))
    k1 = int(round(t1 / dc.dt_trace))
    T = t1 - t0
    d = dc.cum[k1] - dc.cum[k0]
    u = dc.units
    p_load = d[2 * u] / T
    if kind == "chb":
        volts = list(cfg.v_mdl) * 2
    else:
        volts = [cfg.v_total] * 2
    rms = [math.sqrt(max(q, 0.0) / T) for q in d[: 2 * u]]
    return sur(p_load, zip(volts, rms))


@dataclass
class MetricsReport:
    strategy: str
    m: float
    pf: float
    p_out_w: float
    cond_igbt_w: float
    sw_igbt_w: float
    cond_fet_w: float
    sw_fet_w: float
    total_loss_w: float
    thd_ia: float
    ripple_pp_v: float
    sur: float
    commutations_frontend: float
    commutations_backend: float
    error: str = ""
    thd_phases: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))
    i_fund_rms: float = 0.0

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in METRICS_COLUMNS}


METRICS_COLUMNS = (
    "strategy", "m", "pf", "p_out_w", "cond_igbt_w", "sw_igbt_w", "cond_fet_w", "sw_fet_w",
    "total_loss_w", "thd_ia", "ripple_pp_v", "sur", "commutations_frontend",
    "commutations_backend", "error",
)


def evaluate(trace, window: tuple[float, float] | None = None) -> MetricsReport:
    """All metrics of a run over its steady-state window."""
    from .circuit import CUM_LEG_HI1, CUM_LEG_HI2, CUM_LEG_LO1, CUM_LEG_LO2, CUM_MOD, CUM_P_OUT

    sc = trace.scenario
    t0, t1 = window if window is not None else (sc.settle_time, sc.duration)
    T = t1 - t0
    f0 = sc.reference.frequency
    igbt, fet = sc.igbt, sc.fet

    cond_igbt = 0.0
    for x in range(3):
        for c1, c2 in ((CUM_LEG_HI1, CUM_LEG_HI2), (CUM_LEG_LO1, CUM_LEG_LO2)):
            i_avg = trace.window_integral(c1 + x, t0, t1) / T
            i_rms = math.sqrt(max(trace.window_integral(c2 + x, t0, t1), 0.0) / T)
            cond_igbt += conduction_loss(igbt, i_avg, i_rms)

    cond_fet = 0.0
    if sc.strategy is Strategy.PROPOSED:
        n = sc.backend.n_mdl
        for k in range(2 * n):
            q2 = max(trace.window_integral(CUM_MOD + k, t0, t1), 0.0) / T
            cond_fet += conduction_loss(fet, 0.0, math.sqrt(q2))

    sw_igbt = switching_loss(trace.events, igbt, (t0, t1), f0)
    sw_fet = switching_loss(trace.events, fet, (t0, t1), f0)

    k0, k1 = trace.index(t0), trace.index(t1)
    fs = 1.0 / trace.dt_trace
    h = max_harmonic(f0, fs, sc.thd_harmonics)
    thds = tuple(thd(i[k0:k1], f0, fs, h) for i in (trace.i_a, trace.i_b, trace.i_c))
    i1 = harmonic_amplitudes(trace.i_a[k0:k1], f0, fs, 1)[1] / math.sqrt(2.0)

    ripple = 0.0
    if sc.strategy is Strategy.PROPOSED:
        ripple = switching_ripple(trace.v_dc2[k0:k1], fs)

    p_out = trace.window_integral(CUM_P_OUT, t0, t1) / T
    try:
        util = sur(p_out, trace_switch_stresses(trace, t0, t1))
    except ZeroStress:
        util = float("nan")
    counts = switching_counts(trace.events, (t0, t1), f0,
                              sc.backend.n_mdl if sc.backend is not None else 0)
    total = cond_igbt + sw_igbt + cond_fet + sw_fet
    return MetricsReport(
        strategy=sc.strategy.value, m=sc.m, pf=float(f"{sc.load.power_factor(f0):.12g}"), p_out_w=p_out,
        cond_igbt_w=cond_igbt, sw_igbt_w=sw_igbt, cond_fet_w=cond_fet, sw_fet_w=sw_fet,
        total_loss_w=total, thd_ia=thds[0], ripple_pp_v=ripple, sur=util,
        commutations_frontend=round(counts.frontend, 9), commutations_backend=round(counts.backend, 9),
        thd_phases=thds, i_fund_rms=i1,
    )
