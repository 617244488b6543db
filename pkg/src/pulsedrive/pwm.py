"""Carrier comparison for the frontend legs and switching-event extraction.

Events are kept in a numpy structured array (``EVENT_DTYPE``) because a run
produces tens of thousands of them; :class:`SwitchEvent` is the per-row view.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .backend import unipolar_triangle


class DeviceClass(enum.IntEnum):
    IGBT = 0
    FET = 1


EVENT_DTYPE = np.dtype([
    ("t", "f8"),
    ("leg", "i2"),       # frontend leg 0..2, -1 for backend
    ("module", "i2"),    # backend module 0..N-1, -1 for frontend
    ("upper", "?"),
    ("cls", "i1"),
    ("turn_on", "?"),
    ("v_blocked", "f8"),
    ("i_conducted", "f8"),  # > 0: transistor carries it, < 0: antiparallel diode
])


class GateVector(NamedTuple):
    """Leg states, True = upper device on (High)."""

    a: bool | np.ndarray
    b: bool | np.ndarray
    c: bool | np.ndarray


@dataclass(frozen=True)
class SwitchEvent:
    t: float
    leg: int
    module: int
    upper: bool
    cls: DeviceClass
    turn_on: bool
    v_blocked: float
    i_conducted: float

    @classmethod
    def from_row(cls, row) -> "SwitchEvent":
        return cls(float(row["t"]), int(row["leg"]), int(row["module"]), bool(row["upper"]),
                   DeviceClass(int(row["cls"])), bool(row["turn_on"]),
                   float(row["v_blocked"]), float(row["i_conducted"]))


def as_event_array(events) -> np.ndarray:
    """Accept a structured array or an iterable of :class:`SwitchEvent`."""
    if isinstance(events, np.ndarray) and events.dtype == EVENT_DTYPE:
        return events
    events = list(events)
    out = np.zeros(len(events), EVENT_DTYPE)
    for j, e in enumerate(events):
        out[j] = (e.t, e.leg, e.module, e.upper, int(e.cls), e.turn_on, e.v_blocked, e.i_conducted)
    return out


def event_list(events) -> list[SwitchEvent]:
    return [SwitchEvent.from_row(r) for r in as_event_array(events)]


def frontend_carrier(t, f_inv: float):
    """Shared unipolar triangle of the frontend (valley at t = 0)."""
    return unipolar_triangle(np.asarray(t, float) * f_inv)


def frontend_gates(m, t, f_inv: float) -> GateVector:
    """Compare each duty with the shared carrier.

    A duty of 1 keeps its leg High and a duty of 0 keeps it Low for the whole
    carrier period.
    """
    c = frontend_carrier(t, f_inv)
    legs = []
    for mx in m:
        mx = np.asarray(mx, float)
        g = (mx >= c) & (mx > 0.0)
        legs.append(g if g.ndim else bool(g))
    return GateVector(*legs)


def commutations(times, states, currents, volts):
    """Find state changes in a sampled stream.

    ``states[j]`` is the switch state from ``times[j]`` on. Returns arrays
    ``(t, unit, new_state, v, i)`` with one entry per commutation, where
    ``unit`` is the column index.
    """
    states = np.asarray(states, bool)
    if states.ndim == 1:
        states = states[:, None]
    n, units = states.shape
    currents = np.broadcast_to(np.asarray(currents, float).reshape(n, -1), (n, units))
    volts = np.broadcast_to(np.asarray(volts, float).reshape(n, -1) if np.ndim(volts) else
                            np.full((n, 1), float(volts)), (n, units))
    change = states[1:] != states[:-1]
    rows, cols = np.nonzero(change)
    rows = rows + 1
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    t = np.asarray(times, float)[rows]
    return t, cols, states[rows, cols], volts[rows, cols], currents[rows, cols]


def expand_commutations(t, unit, new_state, v, i, cls: DeviceClass, unit_offset: int = 0,
                        frontend: bool = True) -> np.ndarray:
    """Each commutation of a half-bridge is one turn-on and one turn-off.

    ``i`` is the signed unit current (out of the leg midpoint for the frontend,
    string discharge current for a backend module); the upper transistor
    carries positive current, the lower one negative.
    """
    n = len(t)
    out = np.zeros(2 * n, EVENT_DTYPE)
    for half, upper in ((0, True), (1, False)):
        sl = out[half::2]
        sl["t"] = t
        idx = np.asarray(unit, int) - unit_offset
        if frontend:
            sl["leg"], sl["module"] = idx, -1
        else:
            sl["leg"], sl["module"] = -1, idx
        sl["upper"] = upper
        sl["cls"] = int(cls)
        sl["turn_on"] = np.asarray(new_state, bool) if upper else ~np.asarray(new_state, bool)
        sl["v_blocked"] = np.abs(v)
        sl["i_conducted"] = i if upper else -np.asarray(i, float)
    return out


def frontend_events(times, gates, currents, v_dc) -> np.ndarray:
    """Events of the six frontend devices from sampled gates and phase currents."""
    rec = commutations(times, gates, currents, v_dc)
    return expand_commutations(*rec, cls=DeviceClass.IGBT, frontend=True)


def backend_gates(times, states, i_dc, cfg) -> np.ndarray:
    """Events of the module half-bridges from a sampled series/bypass stream."""
    states = np.asarray(states, bool)
    n = states.shape[0]
    volts = np.broadcast_to(cfg.v_mdl, (n, cfg.n_mdl))
    i = np.broadcast_to(np.asarray(i_dc, float).reshape(n, 1) if np.ndim(i_dc) else
                        np.full((n, 1), float(i_dc)), (n, cfg.n_mdl))
    rec = commutations(times, states, i, volts)
    return expand_commutations(*rec, cls=DeviceClass.FET, frontend=False)


@dataclass
class SwitchCounts:
    """Commutations per fundamental period (one commutation = one turn-on)."""

    frontend: float
    backend: float
    per_leg: tuple[float, ...]
    per_module: tuple[float, ...]
    periods: float
    integer_window: bool


def switching_counts(events, window: tuple[float, float], f0: float, n_mdl: int = 0) -> SwitchCounts:
    ev = as_event_array(events)
    t0, t1 = window
    periods = (t1 - t0) * f0
    integer = abs(periods - round(periods)) < 1e-6 * max(1.0, periods)
    sel = ev[(ev["t"] >= t0) & (ev["t"] < t1) & ev["turn_on"]]
    front = sel[sel["cls"] == DeviceClass.IGBT]
    back = sel[sel["cls"] == DeviceClass.FET]
    per_leg = tuple(np.count_nonzero(front["leg"] == k) / periods for k in range(3))
    per_mod = tuple(np.count_nonzero(back["module"] == k) / periods for k in range(n_mdl))
    return SwitchCounts(len(front) / periods, len(back) / periods, per_leg, per_mod, periods, integer)
