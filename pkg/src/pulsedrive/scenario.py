"""Scenario documents: INI-style sections, SI values with optional u/m/k suffixes.

A document looks like::

    [scenario]
    strategy = proposed

    [reference]
    m = 0.95
    frequency = 50

    [backend]
    n_mdl = 16
    v_mdl = 40
    f_mdl = 5k

    [pwm]
    f_inv = 10k

    [filter]
    L = 30u
    C = 60u

    [load]
    r = 1.75
    l = 200u

Every key is optional except the ones the chosen strategy needs; unknown keys
are rejected. ``serialize_scenario`` writes a fully resolved document that
parses back to an identical :class:`Scenario`.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation

from .backend import BackendConfig, ModuleSpec
from .circuit import FilterParams, LoadKind, LoadSpec, dt_max, matched_load
from .metrics import FET_DEFAULT, IGBT_DEFAULT, DeviceLossParams
from .reference import (TWO_PI, ReferenceState, Strategy, amplitude_from_index,
                        modulation_index)

DEFAULT_TRACE_DT = 1e-6
DEFAULT_SETTLE_PERIODS = 3
DEFAULT_WINDOW_PERIODS = 2
DEFAULT_THD_HARMONICS = 2000
#: default solver samples per frontend carrier period, shared by all strategies
FRONTEND_SAMPLES = 1600

_SUFFIX = {"u": Decimal("1e-6"), "m": Decimal("1e-3"), "k": Decimal("1e3")}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(f"{': '.join([', '.join(where), message]) if where else message}")


class ValidationError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class Scenario:
    strategy: Strategy
    reference: ReferenceState
    filter: FilterParams
    load: LoadSpec
    f_inv: float
    backend: BackendConfig | None = None
    vdc: float | None = None
    offsets: tuple[float, ...] = ()
    soc: tuple[float, ...] = ()
    igbt: DeviceLossParams = IGBT_DEFAULT
    fet: DeviceLossParams = FET_DEFAULT
    dt_request: float | None = None
    duration_request: float | None = None
    settle_request: float | None = None
    trace_dt: float = DEFAULT_TRACE_DT
    thd_harmonics: int = DEFAULT_THD_HARMONICS
    seed: int = 0

    # --- derived quantities ---------------------------------------------
    @property
    def v_link_max(self) -> float:
        """Largest dc-link voltage the strategy can apply."""
        if self.strategy is Strategy.PROPOSED:
            return self.backend.v_total
        return float(self.vdc)

    @property
    def m(self) -> float:
        return modulation_index(self.reference.amplitude, self.v_link_max)

    @property
    def period(self) -> float:
        return 1.0 / self.reference.frequency

    @property
    def _grid(self) -> tuple[float, int]:
        """Solver step and decimation, chosen so a period is a whole number of trace samples."""
        if self.dt_request is not None:
            dt = self.dt_request
            decim = max(1, int(self.trace_dt / dt + 1e-9))
            return dt, decim
        n = 0
        f_mdl = 0.0
        if self.strategy is Strategy.PROPOSED:
            n, f_mdl = self.backend.n_mdl, self.backend.f_mdl
        limit = min(dt_max(self.f_inv, n, f_mdl), 1.0 / (FRONTEND_SAMPLES * self.f_inv))
        decim = max(1, int(self.trace_dt / limit + 1e-9))
        per_period = math.ceil(self.period / limit - 1e-9)
        per_period = decim * math.ceil(per_period / decim)
        return self.period / per_period, decim

    @property
    def dt(self) -> float:
        return self._grid[0]

    @property
    def decimation(self) -> int:
        return self._grid[1]

    @property
    def settle_time(self) -> float:
        if self.settle_request is not None:
            return self.settle_request
        return DEFAULT_SETTLE_PERIODS * self.period

    @property
    def duration(self) -> float:
        if self.duration_request is not None:
            return self.duration_request
        return self.settle_time + DEFAULT_WINDOW_PERIODS * self.period

    @property
    def n_steps(self) -> int:
        n = int(round(self.duration / self.dt))
        return n - n % self.decimation

    # --- helpers --------------------------------------------------------
    def with_index(self, m: float) -> "Scenario":
        ref = self.reference._replace(amplitude=amplitude_from_index(m, self.v_link_max))
        return replace(self, reference=ref)

    def with_strategy(self, strategy: Strategy) -> "Scenario":
        return replace(self, strategy=Strategy(strategy))

    def validate(self) -> list[str]:
        errors = list(self.reference.validate())
        if self.strategy is Strategy.PROPOSED:
            if self.backend is None:
                errors.append("backend.n_mdl, backend.v_mdl, backend.f_mdl are required for strategy proposed")
            else:
                errors.extend(self.backend.validate())
                n = self.backend.n_mdl
                if self.offsets and len(self.offsets) != n:
                    errors.append("backend.offsets must have n_mdl entries")
                elif self.offsets and not math.isclose(sum(self.offsets), 0.0, abs_tol=1e-12):
                    errors.append("backend.offsets must sum to zero")
                if self.soc and len(self.soc) != n:
                    errors.append("backend.soc must have n_mdl entries")
        else:
            if self.vdc is None:
                errors.append(f"backend.vdc is required for strategy {self.strategy.value}")
            elif not self.vdc > 0:
                errors.append("backend.vdc must be > 0")
        if any(not 0.0 <= s <= 1.0 for s in self.soc):
            errors.append("backend.soc entries must lie in [0, 1]")
        if not self.f_inv > 0:
            errors.append("pwm.f_inv must be > 0")
        errors.extend(self.filter.validate())
        errors.extend(self.load.validate())
        errors.extend(self.igbt.validate("devices.igbt"))
        errors.extend(self.fet.validate("devices.fet"))
        if self.dt_request is not None and not self.dt_request > 0:
            errors.append("timing.dt must be > 0")
        if not self.trace_dt > 0:
            errors.append("timing.trace_dt must be > 0")
        if self.settle_request is not None and not self.settle_request >= 0:
            errors.append("timing.settle_time must be >= 0")
        if self.duration_request is not None and not self.duration_request > 0:
            errors.append("timing.duration must be > 0")
        if not self.thd_harmonics >= 2:
            errors.append("metrics.thd_harmonics must be >= 2")
        if errors:
            return errors
        if self.dt_request is not None:
            n = self.backend.n_mdl if self.strategy is Strategy.PROPOSED else 0
            f_mdl = self.backend.f_mdl if self.strategy is Strategy.PROPOSED else 0.0
            if self.dt_request > dt_max(self.f_inv, n, f_mdl) * (1 + 1e-12):
                errors.append("timing.dt exceeds the largest step that resolves the carriers")
        if self.settle_time >= self.duration:
            errors.append("timing.settle_time must be shorter than timing.duration")
        return errors

    @property
    def offsets_array(self):
        n = self.backend.n_mdl if self.backend is not None else 0
        return self.offsets if self.offsets else (0.0,) * n


# --- schema ---------------------------------------------------------------

_FLOAT, _INT, _STR, _LIST = "float", "int", "str", "list"

SCHEMA: dict[str, dict[str, str]] = {
    "scenario": {"strategy": _STR, "seed": _INT},
    "reference": {"m": _FLOAT, "amplitude": _FLOAT, "frequency": _FLOAT, "theta": _FLOAT,
                  "ramp_time": _FLOAT},
    "backend": {"n_mdl": _INT, "v_mdl": _FLOAT, "f_mdl": _FLOAT, "r_int": _FLOAT,
                "capacity": _FLOAT, "offsets": _LIST, "soc": _LIST, "vdc": _FLOAT},
    "pwm": {"f_inv": _FLOAT},
    "filter": {"L": _FLOAT, "C": _FLOAT, "r_L": _FLOAT, "r_eq": _FLOAT},
    "load": {"kind": _STR, "r": _FLOAT, "l": _FLOAT, "backemf": _FLOAT, "phase": _FLOAT,
             "i_peak": _FLOAT, "pf": _FLOAT},
    "devices.igbt": {k: _FLOAT for k in ("v_on0", "r_on", "e_on", "e_off", "e_rr", "v_ref", "i_ref")},
    "devices.fet": {k: _FLOAT for k in ("v_on0", "r_on", "e_on", "e_off", "e_rr", "v_ref", "i_ref")},
    "timing": {"dt": _FLOAT, "duration": _FLOAT, "settle_time": _FLOAT, "trace_dt": _FLOAT},
    "metrics": {"thd_harmonics": _INT},
}

_NUM_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([umk]?)\s*$")


def parse_number(text: str) -> float:
    """SI number with an optional u/m/k suffix, scaled exactly in decimal."""
    s = text.strip()
    if s.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if s.lower() in ("-inf", "-infinity"):
        return -math.inf
    mt = _NUM_RE.match(s)
    if not mt:
        raise ValueError(f"not a number: {text!r}")
    try:
        d = Decimal(mt.group(1))
    except InvalidOperation as exc:
        raise ValueError(f"not a number: {text!r}") from exc
    if mt.group(2):
        d *= _SUFFIX[mt.group(2)]
    return float(d)


def format_number(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """Map (section, key) to the line it appears on, for error messages."""
    out: dict[tuple[str, str], int] = {}
    section = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            out.setdefault((section, ""), no)
            continue
        for sep in ("=", ":"):
            if sep in s:
                out.setdefault((section, s.split(sep, 1)[0].strip()), no)
                break
    return out


def _read(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ParseError("duplicate key", exc.lineno, f"{exc.section}.{exc.option}") from exc
    except configparser.DuplicateSectionError as exc:
        raise ParseError("duplicate section", exc.lineno, exc.section) from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside of any section", exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line) from exc
    return cp


def apply_overrides(cp: configparser.ConfigParser, overrides) -> None:
    """Apply ``section.key=value`` strings; the key is the part after the last dot."""
    for item in overrides or ():
        if "=" not in item:
            raise ParseError(f"override {item!r} is not of the form section.key=value")
        path, value = item.split("=", 1)
        path = path.strip()
        if "." not in path:
            raise ParseError(f"override {item!r} needs a section", key=path)
        section, key = path.rsplit(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value.strip())


def _convert(cp: configparser.ConfigParser, lines) -> dict[str, dict]:
    raw: dict[str, dict] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ParseError("unknown section", lines.get((section, "")), section)
        raw[section] = {}
        for key, value in cp.items(section):
            kind = SCHEMA[section].get(key)
            line = lines.get((section, key))
            if kind is None:
                raise ParseError("unknown key", line, f"{section}.{key}")
            try:
                if kind == _FLOAT:
                    raw[section][key] = parse_number(value)
                elif kind == _INT:
                    x = parse_number(value)
                    if x != int(x):
                        raise ValueError(f"not an integer: {value!r}")
                    raw[section][key] = int(x)
                elif kind == _LIST:
                    raw[section][key] = tuple(parse_number(v) for v in value.split(",") if v.strip())
                else:
                    raw[section][key] = value.strip()
            except ValueError as exc:
                raise ParseError(str(exc), line, f"{section}.{key}") from exc
    return raw


def _device(base: DeviceLossParams, values: dict) -> DeviceLossParams:
    return replace(base, **values)


def build_scenario(raw: dict[str, dict]) -> Scenario:
    """Assemble and validate a scenario from converted sections."""
    errors: list[str] = []
    get = lambda s, k, d=None: raw.get(s, {}).get(k, d)  # noqa: E731

    try:
        strategy = Strategy(get("scenario", "strategy", "proposed"))
    except ValueError:
        errors.append("scenario.strategy must be one of proposed, svpwm, dpwm")
        strategy = Strategy.PROPOSED

    backend = None
    b = raw.get("backend", {})
    if "n_mdl" in b or "v_mdl" in b or "f_mdl" in b:
        missing = [k for k in ("n_mdl", "v_mdl", "f_mdl") if k not in b]
        errors.extend(f"backend.{k} is required when a module string is given" for k in missing)
        if not missing and b["n_mdl"] >= 1:
            phases = [TWO_PI * k / b["n_mdl"] for k in range(b["n_mdl"])]
            mods = tuple(ModuleSpec(b["v_mdl"], b.get("r_int", 0.0), b.get("capacity", 5.2), ph)
                         for ph in phases)
            backend = BackendConfig(b["n_mdl"], b["f_mdl"], mods)
        elif not missing:
            errors.append("backend.n_mdl must be an integer >= 1")
    vdc = b.get("vdc")

    r = raw.get("reference", {})
    freq = r.get("frequency")
    if freq is None:
        errors.append("reference.frequency is required")
        freq = 50.0
    if "m" in r and "amplitude" in r:
        errors.append("reference.m and reference.amplitude are mutually exclusive")
    amplitude = r.get("amplitude")
    if amplitude is None:
        if "m" not in r:
            errors.append("reference.m or reference.amplitude is required")
            amplitude = 0.0
        else:
            v_max = None
            if strategy is Strategy.PROPOSED and backend is not None:
                v_max = backend.v_total
            elif strategy is not Strategy.PROPOSED and vdc is not None:
                v_max = vdc
            amplitude = amplitude_from_index(r["m"], v_max) if v_max else 0.0
            if not r["m"] >= 0:
                errors.append("reference.m must be >= 0")
    reference = ReferenceState(amplitude, freq, r.get("theta", 0.0), r.get("ramp_time", 0.0))

    f = raw.get("filter", {})
    for k in ("L", "C"):
        if k not in f:
            errors.append(f"filter.{k} is required")
    filt = FilterParams(f.get("L", 1.0), f.get("C", 1.0), f.get("r_L", 0.0), f.get("r_eq", math.inf))

    ld = raw.get("load", {})
    try:
        kind = LoadKind(ld.get("kind", "series_rl"))
    except ValueError:
        errors.append("load.kind must be series_rl or rl_backemf")
        kind = LoadKind.SERIES_RL
    if "pf" in ld or "i_peak" in ld:
        if "r" in ld or "l" in ld:
            errors.append("load.pf/load.i_peak and load.r/load.l are mutually exclusive")
        if not ("pf" in ld and "i_peak" in ld):
            errors.append("load.pf and load.i_peak must be given together")
            load = LoadSpec(1.0, 0.0)
        elif not (0 < ld["pf"] <= 1 and ld["i_peak"] > 0 and amplitude > 0):
            errors.append("load.pf must lie in (0, 1] and load.i_peak must be > 0 with a nonzero reference")
            load = LoadSpec(1.0, 0.0)
        else:
            load = matched_load(amplitude, ld["i_peak"], ld["pf"], freq)
    else:
        for k in ("r", "l"):
            if k not in ld:
                errors.append(f"load.{k} is required")
        load = LoadSpec(ld.get("r", 1.0), ld.get("l", 0.0), kind, ld.get("backemf", 0.0),
                        ld.get("phase", 0.0))
    if "pf" in ld and kind is not LoadKind.SERIES_RL:
        errors.append("load.pf requires kind = series_rl")

    f_inv = get("pwm", "f_inv")
    if f_inv is None:
        errors.append("pwm.f_inv is required")
        f_inv = 1.0

    t = raw.get("timing", {})
    sc = Scenario(
        strategy=strategy, reference=reference, filter=filt, load=load, f_inv=f_inv,
        backend=backend, vdc=vdc, offsets=b.get("offsets", ()), soc=b.get("soc", ()),
        igbt=_device(IGBT_DEFAULT, raw.get("devices.igbt", {})),
        fet=_device(FET_DEFAULT, raw.get("devices.fet", {})),
        dt_request=t.get("dt"), duration_request=t.get("duration"),
        settle_request=t.get("settle_time"), trace_dt=t.get("trace_dt", DEFAULT_TRACE_DT),
        thd_harmonics=get("metrics", "thd_harmonics", DEFAULT_THD_HARMONICS),
        seed=get("scenario", "seed", 0),
    )
    if not errors:
        errors = sc.validate()
    else:
        # report everything the partial scenario can still check
        try:
            errors.extend(e for e in sc.validate() if e not in errors)
        except Exception:  # noqa: BLE001 - partial scenarios may not be computable
            pass
    if errors:
        raise ValidationError(errors)
    return sc


def parse_scenario(text: str, overrides=None) -> Scenario:
    cp = _read(text)
    apply_overrides(cp, overrides)
    return build_scenario(_convert(cp, _key_lines(text)))


def load_scenario(path, overrides=None) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), overrides)


def scenario_sections(sc: Scenario) -> dict[str, dict[str, str]]:
    """Fully resolved key/value text of ``sc``."""
    fn = format_number
    out: dict[str, dict[str, str]] = {
        "scenario": {"strategy": sc.strategy.value, "seed": str(sc.seed)},
        "reference": {"amplitude": fn(sc.reference.amplitude), "frequency": fn(sc.reference.frequency),
                      "theta": fn(sc.reference.theta), "ramp_time": fn(sc.reference.ramp_time)},
        "backend": {},
        "pwm": {"f_inv": fn(sc.f_inv)},
        "filter": {"L": fn(sc.filter.L), "C": fn(sc.filter.C), "r_L": fn(sc.filter.r_L),
                   "r_eq": fn(sc.filter.r_eq)},
        "load": {"kind": sc.load.kind.value, "r": fn(sc.load.r), "l": fn(sc.load.l),
                 "backemf": fn(sc.load.backemf), "phase": fn(sc.load.phase)},
    }
    if sc.backend is not None:
        mod = sc.backend.modules[0]
        out["backend"].update(n_mdl=str(sc.backend.n_mdl), v_mdl=fn(mod.v_mdl), f_mdl=fn(sc.backend.f_mdl),
                              r_int=fn(mod.r_int), capacity=fn(mod.capacity))
    if sc.offsets:
        out["backend"]["offsets"] = ", ".join(fn(x) for x in sc.offsets)
    if sc.soc:
        out["backend"]["soc"] = ", ".join(fn(x) for x in sc.soc)
    if sc.vdc is not None:
        out["backend"]["vdc"] = fn(sc.vdc)
    for name, dev in (("devices.igbt", sc.igbt), ("devices.fet", sc.fet)):
        out[name] = {k: fn(getattr(dev, k)) for k in SCHEMA[name]}
    timing = {"trace_dt": fn(sc.trace_dt)}
    if sc.dt_request is not None:
        timing["dt"] = fn(sc.dt_request)
    if sc.duration_request is not None:
        timing["duration"] = fn(sc.duration_request)
    if sc.settle_request is not None:
        timing["settle_time"] = fn(sc.settle_request)
    out["timing"] = timing
    out["metrics"] = {"thd_harmonics": str(sc.thd_harmonics)}
    return out


def serialize_scenario(sc: Scenario) -> str:
    lines = []
    for section, items in scenario_sections(sc).items():
        if not items:
            continue
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in items.items())
        lines.append("")
    return "\n".join(lines)
