"""Reconfigurable battery backend: cascaded half-bridge modules under
phase-shifted carriers, per-module balancing offsets and charge bookkeeping."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .reference import TWO_PI, PhaseTriple, envelope_dc_ref

SERIES = True
BYPASS = False


@dataclass(frozen=True)
class ModuleSpec:
    v_mdl: float
    r_int: float = 0.0
    capacity: float = 5.2  # Ah
    carrier_phase: float = 0.0

    def validate(self, k: int = 0) -> list[str]:
        errors = []
        tag = f"backend.module[{k}]"
        if not self.v_mdl > 0:
            errors.append(f"{tag}.v_mdl must be > 0")
        if not self.r_int >= 0:
            errors.append(f"{tag}.r_int must be >= 0")
        if not self.capacity > 0:
            errors.append(f"{tag}.capacity must be > 0")
        if not 0.0 <= self.carrier_phase < TWO_PI:
            errors.append(f"{tag}.carrier_phase must lie in [0, 2*pi)")
        return errors


@dataclass(frozen=True)
class BackendConfig:
    n_mdl: int
    f_mdl: float
    modules: tuple[ModuleSpec, ...]

    @classmethod
    def uniform(cls, n_mdl: int, v_mdl: float, f_mdl: float, r_int: float = 0.0,
                capacity: float = 5.2) -> "BackendConfig":
        """Identical modules with carriers interleaved by 2*pi/n_mdl."""
        mods = tuple(
            ModuleSpec(v_mdl, r_int, capacity, TWO_PI * k / n_mdl) for k in range(n_mdl)
        )
        return cls(n_mdl, f_mdl, mods)

    def validate(self) -> list[str]:
        errors = []
        if not (isinstance(self.n_mdl, int) and self.n_mdl >= 1):
            errors.append("backend.n_mdl must be an integer >= 1")
        if not self.f_mdl > 0:
            errors.append("backend.f_mdl must be > 0")
        if len(self.modules) != self.n_mdl:
            errors.append("backend.modules must have n_mdl entries")
        for k, mod in enumerate(self.modules):
            errors.extend(mod.validate(k))
        return errors

    @property
    def v_mdl(self) -> np.ndarray:
        return np.array([m.v_mdl for m in self.modules])

    @property
    def r_int(self) -> np.ndarray:
        return np.array([m.r_int for m in self.modules])

    @property
    def capacity(self) -> np.ndarray:
        return np.array([m.capacity for m in self.modules])

    @property
    def phases(self) -> np.ndarray:
        return np.array([m.carrier_phase for m in self.modules])

    @property
    def v_total(self) -> float:
        return float(self.v_mdl.sum())


@dataclass
class BackendState:
    states: np.ndarray  # bool per module, True = series
    offsets: np.ndarray = field(default=None)
    soc: np.ndarray = field(default=None)

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=bool)
        n = self.states.shape[-1]
        self.offsets = np.zeros(n) if self.offsets is None else np.asarray(self.offsets, float)
        self.soc = np.ones(n) if self.soc is None else np.asarray(self.soc, float)

    @property
    def n_series(self) -> int:
        return int(np.count_nonzero(self.states))


def unipolar_triangle(u):
    """Triangle in [0, 1] with unit period: valley at integer ``u``, peak at half."""
    frac = np.mod(u, 1.0)
    return 1.0 - np.abs(2.0 * frac - 1.0)


def module_carriers(t, cfg: BackendConfig) -> np.ndarray:
    """Carrier values, shape ``(len(t), n_mdl)`` (or ``(n_mdl,)`` for scalar t)."""
    t = np.asarray(t, float)
    u = cfg.f_mdl * t[..., None] + cfg.phases / TWO_PI
    return unipolar_triangle(u)


def backend_mod_index(p: PhaseTriple, cfg: BackendConfig):
    """Backend duty m_dc = envelope / total module voltage.

    Returns ``(m_dc, overmodulated)``; m_dc is clamped into [0, 1].
    """
    raw = np.asarray(envelope_dc_ref(p)) / cfg.v_total
    over = raw > 1.0
    m = np.clip(raw, 0.0, 1.0)
    if m.ndim:
        return m, over
    return float(m), bool(over)


def effective_duties(m_dc, offsets) -> np.ndarray:
    return np.clip(np.asarray(m_dc, float)[..., None] + np.asarray(offsets, float), 0.0, 1.0)


def psc_series(m_dc, t, cfg: BackendConfig, offsets=None) -> np.ndarray:
    """Series/bypass matrix for the phase-shifted carrier comparison.

    A module is in series when its (offset) duty reaches its carrier; a duty of
    exactly zero never inserts the module.
    """
    offsets = np.zeros(cfg.n_mdl) if offsets is None else np.asarray(offsets, float)
    duty = effective_duties(m_dc, offsets)
    carrier = module_carriers(t, cfg)
    return (duty >= carrier) & (duty > 0.0)


def psc_states(m_dc: float, t: float, cfg: BackendConfig, offsets=None, soc=None) -> BackendState:
    offsets = np.zeros(cfg.n_mdl) if offsets is None else np.asarray(offsets, float)
    states = psc_series(m_dc, t, cfg, offsets)
    return BackendState(states, offsets, soc)


def vdc1_from_states(s: BackendState, cfg: BackendConfig, i_dc: float = 0.0) -> float:
    """String voltage: sum over inserted modules of their terminal voltage."""
    per_module = cfg.v_mdl - i_dc * cfg.r_int
    return float(np.sum(per_module[s.states]))


def module_power_shift(dm, v_mdl, i):
    """Extra power drawn from a module by a duty offset ``dm`` at current ``i``."""
    return dm * v_mdl * i


def module_currents(s: BackendState, i_dc: float) -> np.ndarray:
    """Inserted modules carry the string current, bypassed ones carry none."""
    return np.where(s.states, i_dc, 0.0)


def update_soc(s: BackendState, currents, dt: float, cfg: BackendConfig):
    """Coulomb counting over ``dt``; returns ``(new_state, clamped)``.

    ``clamped`` is set when a module is driven onto or past 0 or 1.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    currents = np.asarray(currents, float)
    soc = s.soc - currents * dt / (3600.0 * cfg.capacity)
    clamped = bool(np.any(((soc <= 0.0) & (currents > 0)) | ((soc >= 1.0) & (currents < 0))))
    return replace(s, soc=np.clip(soc, 0.0, 1.0)), clamped


def balancing_offsets(n_mdl: int, shifts: dict[int, float]) -> np.ndarray:
    """Offset vector from ``{module_index: dm}``; must sum to zero."""
    out = np.zeros(n_mdl)
    for k, v in shifts.items():
        out[k] = v
    if not math.isclose(out.sum(), 0.0, abs_tol=1e-12):
        raise ValueError(f"balancing offsets must sum to zero, got {out.sum()!r}")
    return out
