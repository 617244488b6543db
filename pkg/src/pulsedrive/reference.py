"""Modulation references for the pulsating dc-link drive and its baselines.

All functions accept plain floats or numpy arrays (broadcast elementwise), so
one call can evaluate a single instant or a whole fundamental cycle.
"""
from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
SQRT3 = math.sqrt(3.0)

#: relative envelope threshold below which a reference counts as degenerate
EPS_ENV = 1e-9


class DegenerateReference(ValueError):
    """Raised when the reference envelope is too small to pick a sector."""


class Strategy(enum.Enum):
    PROPOSED = "proposed"
    SVPWM = "svpwm"
    DPWM = "dpwm"


class Sector(enum.IntEnum):
    I = 1
    II = 2
    III = 3
    IV = 4
    V = 5
    VI = 6


class PhaseTriple(NamedTuple):
    """Instantaneous phase voltages (V)."""

    va: float | np.ndarray
    vb: float | np.ndarray
    vc: float | np.ndarray


class ModTriple(NamedTuple):
    """Per-leg duty references."""

    ma: float | np.ndarray
    mb: float | np.ndarray
    mc: float | np.ndarray


class ReferenceState(NamedTuple):
    """Sinusoidal reference: amplitude (V), frequency (Hz), angle (rad).

    ``ramp_time`` > 0 scales the amplitude linearly from zero, which is how the
    spin-up scenarios are driven.
    """

    amplitude: float
    frequency: float
    theta: float = 0.0
    ramp_time: float = 0.0

    def validate(self) -> list[str]:
        errors = []
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            errors.append("reference.frequency must be > 0")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            errors.append("reference.amplitude must be >= 0")
        if not (math.isfinite(self.theta) and 0.0 <= self.theta < TWO_PI):
            errors.append("reference.theta must lie in [0, 2*pi)")
        if not (math.isfinite(self.ramp_time) and self.ramp_time >= 0):
            errors.append("reference.ramp_time must be >= 0")
        return errors


def max_linear_amplitude(v_max: float) -> float:
    """Largest phase amplitude a dc link of ``v_max`` supports without overmodulation."""
    return v_max / SQRT3


def amplitude_from_index(m: float, v_max: float) -> float:
    return m * max_linear_amplitude(v_max)


def modulation_index(amplitude: float, v_max: float) -> float:
    return amplitude / max_linear_amplitude(v_max)


def wrap_angle(theta):
    return np.mod(theta, TWO_PI)


def advance_angle(theta: float, frequency: float, dt: float) -> float:
    """One accumulation step of the electrical angle, wrapped into [0, 2*pi)."""
    theta = theta + TWO_PI * frequency * dt
    if theta >= TWO_PI:
        theta -= TWO_PI
    return theta


def gen_three_phase_refs(state: ReferenceState, theta=None) -> PhaseTriple:
    """Balanced sinusoids at ``theta`` (defaults to ``state.theta``)."""
    th = state.theta if theta is None else theta
    amp = state.amplitude
    return PhaseTriple(
        amp * np.sin(th),
        amp * np.sin(th - TWO_PI / 3.0),
        amp * np.sin(th + TWO_PI / 3.0),
    )


def _stack(p):
    return np.asarray(p.va, float), np.asarray(p.vb, float), np.asarray(p.vc, float)


def envelope_dc_ref(p: PhaseTriple):
    """Optimal inverter dc-link voltage: max minus min of the phase references."""
    va, vb, vc = _stack(p)
    env = np.maximum(np.maximum(va, vb), vc) - np.minimum(np.minimum(va, vb), vc)
    return env if env.ndim else float(env)


def line_voltages(p: PhaseTriple) -> np.ndarray:
    """Signed line voltages in sector order (v_ac, v_bc, v_ba, v_ca, v_cb, v_ab).

    The last axis indexes sectors I..VI.
    """
    va, vb, vc = _stack(p)
    return np.stack([va - vc, vb - vc, vb - va, vc - va, vc - vb, va - vb], axis=-1)


def sector_index(p: PhaseTriple, nominal: float = 1.0):
    """Vectorised sector lookup: 1..6, or 0 where the envelope is degenerate.

    Ties resolve to the smallest sector number.
    """
    lv = line_voltages(p)
    idx = np.argmax(lv, axis=-1) + 1
    env = np.max(lv, axis=-1)
    idx = np.where(env > EPS_ENV * nominal, idx, 0)
    return idx if idx.ndim else int(idx)


def identify_sector(p: PhaseTriple, nominal: float = 1.0) -> Sector:
    idx = sector_index(p, nominal)
    if np.ndim(idx):
        raise TypeError("identify_sector takes a single instant; use sector_index for arrays")
    if idx == 0:
        raise DegenerateReference(f"envelope {envelope_dc_ref(p)!r} too small for sector lookup")
    return Sector(idx)


def frontend_mod_indices(p: PhaseTriple, nominal: float = 1.0):
    """Duty references of the proposed frontend.

    Returns ``(ModTriple, degenerate)``. The leg carrying the largest reference
    sits at 1, the smallest at 0, and the middle one modulates. Where the
    envelope is degenerate all three default to 0.5 and ``degenerate`` is True.
    """
    va, vb, vc = _stack(p)
    lo = np.minimum(np.minimum(va, vb), vc)
    hi = np.maximum(np.maximum(va, vb), vc)
    env = hi - lo
    degenerate = ~(env > EPS_ENV * nominal)
    safe = np.where(degenerate, 1.0, env)
    out = []
    for v in (va, vb, vc):
        m = np.where(degenerate, 0.5, (v - lo) / safe)
        out.append(m if m.ndim else float(m))
    flag = degenerate if degenerate.ndim else bool(degenerate)
    return ModTriple(*out), flag


def table_mod_indices(p: PhaseTriple, sector: Sector) -> ModTriple:
    """Per-sector table form of the frontend references.

    Used as an independent cross-check of :func:`frontend_mod_indices`.
    """
    va, vb, vc = (float(x) for x in p)
    vdc = envelope_dc_ref(p)
    rows = {
        Sector.I: (1.0, (vb - vc) / vdc, 0.0),
        Sector.II: ((va - vc) / vdc, 1.0, 0.0),
        Sector.III: (0.0, 1.0, (vc - va) / vdc),
        Sector.IV: (0.0, (vb - va) / vdc, 1.0),
        Sector.V: ((va - vb) / vdc, 0.0, 1.0),
        Sector.VI: (1.0, 0.0, (vc - vb) / vdc),
    }
    return ModTriple(*rows[Sector(sector)])


def dpwm_common_mode(m: ModTriple):
    """Common-mode offset that clamps one bipolar reference to +1 or -1.

    The larger-magnitude extreme is pinned to its rail: ``1 - max`` when the
    maximum dominates, otherwise ``-1 - min``.
    """
    ma, mb, mc = (np.asarray(x, float) for x in m)
    hi = np.maximum(np.maximum(ma, mb), mc)
    lo = np.minimum(np.minimum(ma, mb), mc)
    off = np.where(hi > -lo, 1.0 - hi, -1.0 - lo)
    return off if off.ndim else float(off)


def _clamp_unit(values):
    out, flag = [], False
    for v in values:
        v = np.asarray(v, float)
        bad = (v < 0.0) | (v > 1.0)
        flag = flag | bad
        v = np.clip(v, 0.0, 1.0)
        out.append(v if v.ndim else float(v))
    flag = flag if np.ndim(flag) else bool(flag)
    return ModTriple(*out), flag


def svpwm_refs(p: PhaseTriple, vdc: float):
    """Min-max injected (space-vector equivalent) duties for a fixed dc link.

    Returns ``(ModTriple, overmodulated)``; duties are clamped to [0, 1].
    """
    if not vdc > 0:
        raise ValueError("vdc must be > 0")
    va, vb, vc = _stack(p)
    lo = np.minimum(np.minimum(va, vb), vc)
    hi = np.maximum(np.maximum(va, vb), vc)
    shift = 0.5 - (hi + lo) / (2.0 * vdc)
    return _clamp_unit([va / vdc + shift, vb / vdc + shift, vc / vdc + shift])


def dpwm_refs(p: PhaseTriple, vdc: float):
    """Discontinuous PWM duties: bipolar references plus the clamping offset."""
    if not vdc > 0:
        raise ValueError("vdc must be > 0")
    va, vb, vc = _stack(p)
    bip = ModTriple(2.0 * va / vdc, 2.0 * vb / vdc, 2.0 * vc / vdc)
    off = dpwm_common_mode(bip)
    duties = []
    for b in bip:
        d = 0.5 * (b + off + 1.0)
        # the clamped leg must land exactly on the rail
        d = np.where(np.abs(d - 1.0) < 1e-12, 1.0, np.where(np.abs(d) < 1e-12, 0.0, d))
        duties.append(d)
    return _clamp_unit(duties)


def strategy_refs(strategy: Strategy, p: PhaseTriple, vdc: float | None = None, nominal: float = 1.0):
    """Dispatch to the duty generator of ``strategy``; returns ``(ModTriple, flag)``."""
    strategy = Strategy(strategy)
    if strategy is Strategy.PROPOSED:
        return frontend_mod_indices(p, nominal)
    if strategy is Strategy.SVPWM:
        return svpwm_refs(p, vdc)
    return dpwm_refs(p, vdc)
