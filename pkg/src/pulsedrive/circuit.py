"""Fixed-step solver for backend -> L-C filter -> two-level inverter -> load.

The switched network is integrated with a semi-implicit (symplectic) Euler
scheme: branch currents are advanced first from the old capacitor voltage,
then the capacitor is advanced with the new currents. Switch states are
evaluated at the midpoint of each step and held over it. The inner loop is
compiled with numba; :func:`step` exposes the same update for one step.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .backend import BackendConfig
from .pwm import DeviceClass, GateVector, expand_commutations
from .reference import EPS_ENV, TWO_PI, Strategy

BLOWUP_FACTOR = 1e6


class NumericalBlowup(RuntimeError):
    """A state variable left the physically plausible range."""


class ResonanceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FilterParams:
    L: float
    C: float
    r_L: float = 0.0
    r_eq: float = math.inf

    def validate(self) -> list[str]:
        errors = []
        if not self.L > 0:
            errors.append("filter.L must be > 0")
        if not self.C > 0:
            errors.append("filter.C must be > 0")
        if not self.r_L >= 0:
            errors.append("filter.r_L must be >= 0")
        if not self.r_eq > 0:
            errors.append("filter.r_eq must be > 0")
        return errors

    @property
    def f_res(self) -> float:
        return 1.0 / (TWO_PI * math.sqrt(self.L * self.C))


class LoadKind(enum.Enum):
    SERIES_RL = "series_rl"
    RL_BACKEMF = "rl_backemf"


@dataclass(frozen=True)
class LoadSpec:
    """Per-phase R-L load with optional balanced back-emf.

    The back-emf of phase x is ``backemf * sin(theta_x + phase)``, scaled by
    the same ramp as the reference.
    """

    r: float
    l: float
    kind: LoadKind = LoadKind.SERIES_RL
    backemf: float = 0.0
    phase: float = 0.0

    def validate(self) -> list[str]:
        errors = []
        if not self.r >= 0:
            errors.append("load.r must be >= 0")
        if not self.l >= 0:
            errors.append("load.l must be >= 0")
        if self.r == 0 and self.l == 0:
            errors.append("load.r and load.l cannot both be zero")
        if self.kind is LoadKind.SERIES_RL and self.backemf != 0:
            errors.append("load.backemf requires kind = rl_backemf")
        if not self.backemf >= 0:
            errors.append("load.backemf must be >= 0")
        return errors

    def power_factor(self, f: float) -> float:
        if self.kind is LoadKind.RL_BACKEMF:
            return math.cos(self.phase)
        z = math.hypot(self.r, TWO_PI * f * self.l)
        return self.r / z


def matched_load(amplitude: float, i_peak: float, pf: float, f: float) -> LoadSpec:
    """Series R-L load drawing ``i_peak`` at ``pf`` from a phase amplitude."""
    if not 0 < pf <= 1:
        raise ValueError("pf must lie in (0, 1]")
    z = amplitude / i_peak
    return LoadSpec(r=z * pf, l=z * math.sqrt(1.0 - pf * pf) / (TWO_PI * f))


@dataclass
class CircuitState:
    i_L: float = 0.0
    v_dc2: float = 0.0
    i_a: float = 0.0
    i_b: float = 0.0
    i_c: float = 0.0
    t: float = 0.0


# cumulative-integral columns of a trace (per-leg blocks of three, then scalars, then per-module)
CUM_LEG_HI2, CUM_LEG_LO2, CUM_LEG_HI1, CUM_LEG_LO1 = 0, 3, 6, 9
CUM_E_IN, CUM_P_OUT, CUM_P_R, CUM_P_EMF, CUM_P_RL, CUM_Q_L, CUM_Q_INV = range(12, 19)
CUM_MOD = 19


@dataclass
class SimTrace:
    """Uniformly sampled run.

    ``gates`` and ``states`` hold the switch states of the solver step that
    ends at each sample (row 0: the first step). ``cum`` holds running
    integrals accumulated at the solver rate (see ``CUM_*``), so window means
    are exact differences rather than estimates from decimated samples.
    """

    t: np.ndarray
    v_dc1: np.ndarray
    v_dc2: np.ndarray
    i_L: np.ndarray
    i_a: np.ndarray
    i_b: np.ndarray
    i_c: np.ndarray
    gates: np.ndarray
    states: np.ndarray
    cum: np.ndarray
    events: np.ndarray
    dt: float
    decimation: int
    scenario: object = None
    flags: dict = field(default_factory=dict)

    @property
    def dt_trace(self) -> float:
        return self.dt * self.decimation

    @property
    def n_series(self) -> np.ndarray:
        return self.states.sum(axis=1)

    @property
    def module_currents(self) -> np.ndarray:
        return self.i_L[:, None] * self.states

    @property
    def phase_currents(self) -> np.ndarray:
        return np.stack([self.i_a, self.i_b, self.i_c], axis=1)

    def index(self, t: float) -> int:
        k = t / self.dt_trace
        if abs(k - round(k)) > 1e-6:
            raise ValueError(f"time {t!r} is not on the trace grid")
        return int(round(k))

    def window_integral(self, col, t0: float, t1: float):
        k0, k1 = self.index(t0), self.index(t1)
        return self.cum[k1, col] - self.cum[k0, col]


@numba.njit(cache=True)
def _tri(u):
    f = u - math.floor(u)
    return 1.0 - abs(2.0 * f - 1.0)


@numba.njit(cache=True)
def _advance(i_l, v, ia, ib, v1, ga, gb, gc, dt, L, C, r_l, lr, ll, ea, eb, ec, stiff):
    """One semi-implicit step; returns new (i_L, v_dc2, ia, ib, ic, i_inv, vxa, vxb, vxc)."""
    gm = (ga + gb + gc) / 3.0
    vxa = v * (ga - gm)
    vxb = v * (gb - gm)
    vxc = v * (gc - gm)
    den = ll + dt * lr
    na = (ll * ia + dt * (vxa - ea)) / den
    nb = (ll * ib + dt * (vxb - eb)) / den
    nc = -na - nb
    i_inv = ga * na + gb * nb + gc * nc
    if stiff:
        return i_inv, v, na, nb, nc, i_inv, vxa, vxb, vxc
    n_il = (L * i_l + dt * (v1 - v)) / (L + dt * r_l)
    nv = v + dt / C * (n_il - i_inv)
    return n_il, nv, na, nb, nc, i_inv, vxa, vxb, vxc


@numba.njit(cache=True)
def _frontend_duties(mode, va, vb, vc, vdc, eps):
    hi = max(va, max(vb, vc))
    lo = min(va, min(vb, vc))
    if mode == 0:
        env = hi - lo
        if not env > eps:
            return 0.5, 0.5, 0.5, 1
        return (va - lo) / env, (vb - lo) / env, (vc - lo) / env, 0
    if mode == 1:
        sh = 0.5 - (hi + lo) / (2.0 * vdc)
        da, db, dc = va / vdc + sh, vb / vdc + sh, vc / vdc + sh
    else:
        ba, bb, bc = 2.0 * va / vdc, 2.0 * vb / vdc, 2.0 * vc / vdc
        bhi = max(ba, max(bb, bc))
        blo = min(ba, min(bb, bc))
        off = 1.0 - bhi if bhi > -blo else -1.0 - blo
        da, db, dc = 0.5 * (ba + off + 1.0), 0.5 * (bb + off + 1.0), 0.5 * (bc + off + 1.0)
        if abs(da - 1.0) < 1e-12:
            da = 1.0
        elif abs(da) < 1e-12:
            da = 0.0
        if abs(db - 1.0) < 1e-12:
            db = 1.0
        elif abs(db) < 1e-12:
            db = 0.0
        if abs(dc - 1.0) < 1e-12:
            dc = 1.0
        elif abs(dc) < 1e-12:
            dc = 0.0
    flag = 0
    if da < 0.0 or da > 1.0 or db < 0.0 or db > 1.0 or dc < 0.0 or dc > 1.0:
        flag = 1
    return min(max(da, 0.0), 1.0), min(max(db, 0.0), 1.0), min(max(dc, 0.0), 1.0), flag


@numba.njit(cache=True)
def _run(mode, n_steps, dt, decim, theta0, omega, amp, ramp, vdc, v_norm,
         f_mdl, phases, v_mdl, r_int, offsets, f_inv, L, C, r_l,
         lr, ll, emf, emf_phase, x0, limit,
         tr, tr_g, tr_s, cum, ev_t, ev_unit, ev_new, ev_v, ev_i):
    n_mod = v_mdl.shape[0]
    stiff = mode != 0
    eps = EPS_ENV * amp
    i_l, v, ia, ib = x0[0], x0[1], x0[2], x0[3]
    ic = -ia - ib
    theta = theta0
    acc = np.zeros(cum.shape[1])
    prev_g = np.zeros(3, np.int8)
    g = np.zeros(3, np.int8)
    s = np.zeros(n_mod, np.int8)
    prev_s = np.zeros(n_mod, np.int8)
    n_ev = 0
    cap = ev_t.shape[0]
    n_over = 0
    n_degen = 0
    third = TWO_PI / 3.0
    for n in range(n_steps):
        t_n = n * dt
        tm = (n + 0.5) * dt
        scale = 1.0
        if ramp > 0.0 and tm < ramp:
            scale = tm / ramp
        th = theta + 0.5 * omega * dt
        m_amp = amp * scale
        va = m_amp * math.sin(th)
        vb = m_amp * math.sin(th - third)
        vc = m_amp * math.sin(th + third)
        da, db, dcc, flag = _frontend_duties(mode, va, vb, vc, vdc, eps)
        if mode == 0:
            n_degen += flag
        else:
            n_over += flag
        c = _tri(f_inv * tm)
        g[0] = 1 if (da >= c and da > 0.0) else 0
        g[1] = 1 if (db >= c and db > 0.0) else 0
        g[2] = 1 if (dcc >= c and dcc > 0.0) else 0
        v1 = vdc
        if mode == 0:
            hi = max(va, max(vb, vc))
            lo = min(va, min(vb, vc))
            mdc = (hi - lo) / v_norm
            if mdc > 1.0:
                mdc = 1.0
                n_over += 1
            v1 = 0.0
            for k in range(n_mod):
                mk = min(max(mdc + offsets[k], 0.0), 1.0)
                ck = _tri(f_mdl * tm + phases[k] / TWO_PI)
                s[k] = 1 if (mk >= ck and mk > 0.0) else 0
                if s[k] == 1:
                    v1 += v_mdl[k] - i_l * r_int[k]
        if n == 0:
            for x in range(3):
                prev_g[x] = g[x]
            for k in range(n_mod):
                prev_s[k] = s[k]
        # commutations at the start of this step
        ii = (ia, ib, ic)
        for x in range(3):
            if g[x] != prev_g[x]:
                if n_ev < cap:
                    ev_t[n_ev] = t_n
                    ev_unit[n_ev] = x
                    ev_new[n_ev] = g[x]
                    ev_v[n_ev] = v
                    ev_i[n_ev] = ii[x]
                n_ev += 1
                prev_g[x] = g[x]
        for k in range(n_mod):
            if s[k] != prev_s[k]:
                if n_ev < cap:
                    ev_t[n_ev] = t_n
                    ev_unit[n_ev] = 3 + k
                    ev_new[n_ev] = s[k]
                    ev_v[n_ev] = v_mdl[k]
                    ev_i[n_ev] = i_l
                n_ev += 1
                prev_s[k] = s[k]
        ea = emf * scale * math.sin(th + emf_phase)
        eb = emf * scale * math.sin(th - third + emf_phase)
        ec = emf * scale * math.sin(th + third + emf_phase)
        i_l, v_new, ia, ib, ic, i_inv, vxa, vxb, vxc = _advance(
            i_l, v, ia, ib, v1, g[0], g[1], g[2], dt, L, C, r_l, lr, ll, ea, eb, ec, stiff)
        v = v_new
        if stiff:
            v1 = vdc
        # running integrals with the end-of-step currents
        ii = (ia, ib, ic)
        for x in range(3):
            sq = ii[x] * ii[x]
            ab = abs(ii[x])
            if g[x] == 1:
                acc[CUM_LEG_HI2 + x] += sq * dt
                acc[CUM_LEG_HI1 + x] += ab * dt
            else:
                acc[CUM_LEG_LO2 + x] += sq * dt
                acc[CUM_LEG_LO1 + x] += ab * dt
        acc[CUM_E_IN] += v1 * i_l * dt
        acc[CUM_P_OUT] += (vxa * ia + vxb * ib + vxc * ic) * dt
        acc[CUM_P_R] += lr * (ia * ia + ib * ib + ic * ic) * dt
        acc[CUM_P_EMF] += (ea * ia + eb * ib + ec * ic) * dt
        acc[CUM_P_RL] += r_l * i_l * i_l * dt
        acc[CUM_Q_L] += i_l * dt
        acc[CUM_Q_INV] += i_inv * dt
        if mode == 0:
            for k in range(n_mod):
                if s[k] == 1:
                    acc[CUM_MOD + k] += i_l * i_l * dt
                    acc[CUM_MOD + 2 * n_mod + k] += i_l * dt
                else:
                    acc[CUM_MOD + n_mod + k] += i_l * i_l * dt
        theta += omega * dt
        if theta >= TWO_PI:
            theta -= TWO_PI
        if (abs(v) > limit or abs(i_l) > limit or abs(ia) > limit or abs(ib) > limit
                or not (math.isfinite(v) and math.isfinite(ia) and math.isfinite(ib))):
            return 1, n, n_ev, n_over, n_degen
        if n == 0:
            tr[0, 1] = v1
            for x in range(3):
                tr_g[0, x] = g[x]
            for k in range(n_mod):
                tr_s[0, k] = s[k]
        if (n + 1) % decim == 0:
            r = (n + 1) // decim
            tr[r, 0] = (n + 1) * dt
            tr[r, 1] = v1
            tr[r, 2] = v
            tr[r, 3] = i_l
            tr[r, 4] = ia
            tr[r, 5] = ib
            tr[r, 6] = ic
            for x in range(3):
                tr_g[r, x] = g[x]
            for k in range(n_mod):
                tr_s[r, k] = s[k]
            for j in range(acc.shape[0]):
                cum[r, j] = acc[j]
    return 0, n_steps, n_ev, n_over, n_degen


@numba.njit(cache=True)
def _run_dc_stage(kind, n_steps, dt, decim, m_dc, f_s, phases, v_mdl, offsets,
                  L, C, r_l, g_load, x0, tr, cum):
    n_mod = v_mdl.shape[0]
    units = cum.shape[1] // 2 - 1
    v_tot = v_mdl.sum()
    duty = np.empty(n_mod)
    for k in range(n_mod):
        duty[k] = min(max(m_dc + offsets[k], 0.0), 1.0)
    on = np.zeros(units, np.bool_)
    i_l, v = x0[0], x0[1]
    acc = np.zeros(cum.shape[1])
    tr[0, 2] = v
    tr[0, 3] = i_l
    for n in range(n_steps):
        tm = (n + 0.5) * dt
        v1 = 0.0
        if kind == 0:
            for k in range(n_mod):
                on[k] = duty[k] >= _tri(f_s * tm + phases[k] / TWO_PI) and duty[k] > 0.0
                if on[k]:
                    v1 += v_mdl[k]
        else:
            on[0] = m_dc >= _tri(f_s * tm) and m_dc > 0.0
            if on[0]:
                v1 = v_tot
        i_l = (L * i_l + dt * (v1 - v)) / (L + dt * r_l)
        v = (v + dt / C * i_l) / (1.0 + dt * g_load / C)
        sq = i_l * i_l * dt
        for k in range(units):
            if on[k]:
                acc[k] += sq
            else:
                acc[units + k] += sq
        acc[2 * units] += v * v * g_load * dt
        acc[2 * units + 1] += v1 * i_l * dt
        if n == 0:
            tr[0, 1] = v1
        if (n + 1) % decim == 0:
            r = (n + 1) // decim
            tr[r, 0] = (n + 1) * dt
            tr[r, 1] = v1
            tr[r, 2] = v
            tr[r, 3] = i_l
            for j in range(acc.shape[0]):
                cum[r, j] = acc[j]
    return 0


def step(state: CircuitState, v_dc1: float, gates: GateVector, filt: FilterParams,
         load: LoadSpec, dt: float, emf=(0.0, 0.0, 0.0), stiff: bool = False,
         limit: float | None = None) -> CircuitState:
    """Advance the network by one step with the switch states held.

    ``emf`` is the instantaneous back-emf of the three phases; ``stiff`` pins
    v_dc2 (fixed dc-link baselines).
    """
    out = _advance(state.i_L, state.v_dc2, state.i_a, state.i_b, float(v_dc1),
                   float(bool(gates[0])), float(bool(gates[1])), float(bool(gates[2])), dt,
                   filt.L, filt.C, filt.r_L, load.r, load.l, emf[0], emf[1], emf[2], stiff)
    new = CircuitState(out[0], out[1], out[2], out[3], out[4], state.t + dt)
    if limit is not None:
        for name in ("i_L", "v_dc2", "i_a", "i_b", "i_c"):
            val = getattr(new, name)
            if not (math.isfinite(val) and abs(val) <= limit):
                raise NumericalBlowup(f"{name}={val!r} at t={new.t!r}")
    return new


def dt_max(f_inv: float, n_mdl: int = 0, f_mdl: float = 0.0) -> float:
    """Largest step resolving every effective switching period by 200 samples."""
    limits = [1.0 / (200.0 * f_inv)]
    if n_mdl and f_mdl:
        limits.append(1.0 / (200.0 * n_mdl * f_mdl))
    return min(limits)


def _event_capacity(duration: float, f_inv: float, n_mdl: int, f_mdl: float) -> int:
    return int(4 * duration * (3 * f_inv + n_mdl * f_mdl)) + 1024


def simulate(scenario, x0=None) -> SimTrace:
    """Run one scenario from its initial conditions.

    v_dc2 starts pre-charged to the reference envelope (or the fixed dc link)
    with all currents zero unless ``x0 = (i_L, v_dc2, i_a, i_b)`` is given.
    """
    sc = scenario
    ref = sc.reference
    dt = sc.dt
    decim = sc.decimation
    n_steps = sc.n_steps
    n_trace = n_steps // decim + 1
    proposed = sc.strategy is Strategy.PROPOSED
    mode = {Strategy.PROPOSED: 0, Strategy.SVPWM: 1, Strategy.DPWM: 2}[sc.strategy]
    if proposed:
        cfg: BackendConfig = sc.backend
        phases, v_mdl, r_int = cfg.phases, cfg.v_mdl, cfg.r_int
        offsets = np.asarray(sc.offsets_array, float)
        f_mdl = cfg.f_mdl
        v_norm = cfg.v_total
        vdc = 0.0
    else:
        phases = v_mdl = r_int = offsets = np.zeros(0)
        f_mdl = 0.0
        v_norm = vdc = float(sc.vdc)
    n_mod = len(v_mdl)
    if x0 is None:
        if proposed:
            env0 = ref.amplitude * (0.0 if ref.ramp_time > 0 else 1.0)
            th = ref.theta
            vv = [math.sin(th), math.sin(th - TWO_PI / 3), math.sin(th + TWO_PI / 3)]
            v0 = env0 * (max(vv) - min(vv))
        else:
            v0 = vdc
        x0 = (0.0, v0, 0.0, 0.0)
    x0 = np.asarray(x0, float)
    scale = max(v_norm, abs(x0).max(), 1.0)
    limit = BLOWUP_FACTOR * scale
    n_cum = CUM_MOD + 3 * n_mod
    tr = np.zeros((n_trace, 7))
    tr[0, 2:7] = (x0[1], x0[0], x0[2], x0[3], -x0[2] - x0[3])
    tr_g = np.zeros((n_trace, 3), np.int8)
    tr_s = np.zeros((n_trace, n_mod), np.int8)
    cum = np.zeros((n_trace, n_cum))
    cap = _event_capacity(sc.duration, sc.f_inv, n_mod, f_mdl)
    while True:
        ev_t = np.zeros(cap)
        ev_unit = np.zeros(cap, np.int32)
        ev_new = np.zeros(cap, np.int8)
        ev_v = np.zeros(cap)
        ev_i = np.zeros(cap)
        status, at, n_ev, n_over, n_degen = _run(
            mode, n_steps, dt, decim, ref.theta, TWO_PI * ref.frequency, ref.amplitude,
            ref.ramp_time, vdc, v_norm, f_mdl, phases, v_mdl, r_int, offsets, sc.f_inv,
            sc.filter.L, sc.filter.C, sc.filter.r_L, sc.load.r, sc.load.l, sc.load.backemf,
            sc.load.phase, x0, limit, tr, tr_g, tr_s, cum, ev_t, ev_unit, ev_new, ev_v, ev_i)
        if status == 1:
            raise NumericalBlowup(f"state exceeded {limit:g} at t={at * dt!r} s")
        if n_ev <= cap:
            break
        cap = 2 * n_ev
    ev_t, ev_unit, ev_new, ev_v, ev_i = (a[:n_ev] for a in (ev_t, ev_unit, ev_new, ev_v, ev_i))
    front = ev_unit < 3
    events = np.concatenate([
        expand_commutations(ev_t[front], ev_unit[front], ev_new[front].astype(bool),
                            ev_v[front], ev_i[front], DeviceClass.IGBT, 0, True),
        expand_commutations(ev_t[~front], ev_unit[~front], ev_new[~front].astype(bool),
                            ev_v[~front], ev_i[~front], DeviceClass.FET, 3, False),
    ])
    events = events[np.argsort(events["t"], kind="stable")]
    return SimTrace(
        t=tr[:, 0], v_dc1=tr[:, 1], v_dc2=tr[:, 2], i_L=tr[:, 3],
        i_a=tr[:, 4], i_b=tr[:, 5], i_c=tr[:, 6],
        gates=tr_g.astype(bool), states=tr_s.astype(bool), cum=cum, events=events,
        dt=dt, decimation=decim, scenario=sc,
        flags={"overmodulated_steps": int(n_over), "degenerate_steps": int(n_degen)},
    )


@dataclass
class DcStageTrace:
    """Backend-only run (frontend replaced by a resistor)."""

    t: np.ndarray
    v_dc1: np.ndarray
    v_dc2: np.ndarray
    i_L: np.ndarray
    cum: np.ndarray
    units: int
    dt: float
    decimation: int

    @property
    def dt_trace(self) -> float:
        return self.dt * self.decimation


def simulate_dc_stage(kind: str, m_dc: float, cfg: BackendConfig, filt: FilterParams,
                      duration: float, dt: float, r_load: float = math.inf,
                      decimation: int = 1, offsets=None, x0=None,
                      f_s: float | None = None) -> DcStageTrace:
    """Constant-duty run of a CHB string or an equivalent buck converter.

    ``kind`` is ``"chb"`` or ``"buck"``. The buck switches the full string
    voltage at ``f_s`` (default ``n_mdl * f_mdl``, matching the effective
    frequency of the interleaved string).
    """
    if kind not in ("chb", "buck"):
        raise ValueError(f"unknown dc stage {kind!r}")
    n_steps = int(round(duration / dt))
    n_trace = n_steps // decimation + 1
    offsets = np.zeros(cfg.n_mdl) if offsets is None else np.asarray(offsets, float)
    if f_s is None:
        f_s = cfg.f_mdl if kind == "chb" else cfg.n_mdl * cfg.f_mdl
    units = cfg.n_mdl if kind == "chb" else 1
    g_load = 0.0 if math.isinf(r_load) else 1.0 / r_load
    if x0 is None:
        x0 = (0.0, 0.0)
    x0 = np.asarray(x0, float)
    tr = np.zeros((n_trace, 4))
    cum = np.zeros((n_trace, 2 * units + 2))
    _run_dc_stage(0 if kind == "chb" else 1, n_steps, dt, decimation, float(m_dc), f_s,
                  cfg.phases, cfg.v_mdl, offsets, filt.L, filt.C, filt.r_L, g_load, x0, tr, cum)
    return DcStageTrace(tr[:, 0], tr[:, 1], tr[:, 2], tr[:, 3], cum, units, dt, decimation)


def filter_frequency_response(filt: FilterParams, f):
    """Gain and phase (degrees) from v_dc1 to v_dc2 with the inverter as ``r_eq``.

    Accepts scalar or array ``f``; ``f = 0`` is the dc passthrough.
    """
    f = np.asarray(f, float)
    w = TWO_PI * f
    lc = 1.0 - w * w * filt.L * filt.C
    if math.isinf(filt.r_eq):
        den = lc + 1j * w * filt.C * filt.r_L
        if filt.r_L == 0 and np.any(np.abs(lc) < 1e-6):
            warnings.warn("undamped L-C resonance: gain is unbounded", ResonanceWarning, stacklevel=2)
    else:
        # r_eq / (r_eq (1 - w^2 LC) + jwL + r_L (1 + jwC r_eq)), divided through by r_eq
        den = lc + (1j * w * filt.L + filt.r_L * (1.0 + 1j * w * filt.C * filt.r_eq)) / filt.r_eq
    with np.errstate(divide="ignore", invalid="ignore"):
        h = 1.0 / den
    gain = np.abs(h)
    phase = np.degrees(np.angle(h))
    if gain.ndim == 0:
        return float(gain), float(phase)
    return gain, phase
