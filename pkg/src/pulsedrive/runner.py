"""Three-case comparisons, parameter sweeps and CSV artifacts."""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .circuit import NumericalBlowup, SimTrace, matched_load, simulate
from .metrics import METRICS_COLUMNS, MetricsReport, evaluate
from .reference import Strategy
from .scenario import (ParseError, Scenario, ValidationError, format_number, parse_scenario,
                       serialize_scenario)

SWEEP_CAP = 10_000
COMPARISON_ORDER = (Strategy.PROPOSED, Strategy.DPWM, Strategy.SVPWM)


def bundled(name: str) -> Path:
    """Path of a scenario file shipped with the package."""
    return Path(str(resources.files("pulsedrive") / "data" / name))


def run_scenario(sc: Scenario) -> tuple[SimTrace, MetricsReport]:
    trace = simulate(sc)
    return trace, evaluate(trace)


def error_report(exc: BaseException, strategy: str = "", m: float = math.nan,
                 pf: float = math.nan) -> MetricsReport:
    nan = math.nan
    msg = f"{type(exc).__name__}: {exc}".replace("\n", "; ")
    return MetricsReport(strategy, m, pf, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                         error=msg)


def _metrics_only(sc: Scenario) -> MetricsReport:
    try:
        return run_scenario(sc)[1]
    except (NumericalBlowup, ValueError, ArithmeticError) as exc:
        return error_report(exc, sc.strategy.value, sc.m, sc.load.power_factor(sc.reference.frequency))


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def comparison_scenarios(base: Scenario, ms, pfs, i_peak: float = 200.0) -> list[Scenario]:
    """The three strategies at each (m, pf), all drawing the same peak current."""
    out = []
    for m in ms:
        for pf in pfs:
            for strategy in COMPARISON_ORDER:
                sc = base.with_strategy(strategy).with_index(m)
                load = matched_load(sc.reference.amplitude, i_peak, pf, sc.reference.frequency)
                out.append(replace(sc, load=load))
    return out


def run_comparison(base: Scenario, ms, pfs, i_peak: float = 200.0, jobs: int = 1) -> list[MetricsReport]:
    """One metrics row per (m, pf, strategy); a failing row does not stop the others."""
    return _map(_comparison_point, comparison_scenarios(base, ms, pfs, i_peak), jobs)


def _comparison_point(sc: Scenario) -> MetricsReport:
    errors = sc.validate()
    if errors:
        return error_report(ValidationError(errors), sc.strategy.value, sc.m,
                            sc.load.power_factor(sc.reference.frequency))
    return _metrics_only(sc)


@dataclass(frozen=True)
class SweepSpec:
    base_text: str
    axes: tuple[tuple[str, tuple[str, ...]], ...]
    cap: int = SWEEP_CAP

    @property
    def size(self) -> int:
        return math.prod(len(v) for _, v in self.axes) if self.axes else 1

    def points(self) -> list[tuple[str, ...]]:
        """Override lists in row order: the first axis varies slowest."""
        if self.size > self.cap:
            raise ValueError(f"sweep has {self.size} points, more than the cap of {self.cap}")
        names = [name for name, _ in self.axes]
        return [tuple(f"{n}={v}" for n, v in zip(names, combo))
                for combo in itertools.product(*(vals for _, vals in self.axes))]


def parse_sweep(text: str, base_dir: str | os.PathLike = ".") -> SweepSpec:
    """Sweep document: ``[sweep] base = <scenario file>`` plus ``[axes] section.key = v1, v2``."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc).splitlines()[0]) from exc
    unknown = [s for s in cp.sections() if s not in ("sweep", "axes")]
    if unknown:
        raise ParseError("unknown section", key=unknown[0])
    if not cp.has_option("sweep", "base"):
        raise ValidationError(["sweep.base is required"])
    for key in cp.options("sweep"):
        if key not in ("base", "cap"):
            raise ParseError("unknown key", key=f"sweep.{key}")
    base = Path(cp.get("sweep", "base"))
    if not base.is_absolute():
        base = Path(base_dir) / base
        if not base.exists() and bundled(base.name).exists():
            base = bundled(base.name)
    base_text = base.read_text(encoding="utf-8")
    cap = int(cp.get("sweep", "cap", fallback=str(SWEEP_CAP)))
    axes = []
    if cp.has_section("axes"):
        for key, value in cp.items("axes"):
            vals = tuple(v.strip() for v in value.split(",") if v.strip())
            if not vals:
                raise ValidationError([f"axes.{key} has no values"])
            axes.append((key, vals))
    spec = SweepSpec(base_text, tuple(axes), cap)
    if spec.size > cap:
        raise ValidationError([f"sweep has {spec.size} points, more than the cap of {cap}"])
    return spec


def load_sweep(path) -> SweepSpec:
    path = Path(path)
    return parse_sweep(path.read_text(encoding="utf-8"), path.parent)


def _sweep_point(args) -> MetricsReport:
    text, overrides = args
    try:
        sc = parse_scenario(text, overrides)
    except (ParseError, ValidationError) as exc:
        strategy = next((o.split("=", 1)[1] for o in overrides if o.startswith("scenario.strategy=")), "")
        return error_report(exc, strategy)
    return _metrics_only(sc)


def sweep(spec: SweepSpec, jobs: int = 1) -> list[MetricsReport]:
    """One metrics row per grid point, in grid order regardless of ``jobs``."""
    return _map(_sweep_point, [(spec.base_text, pt) for pt in spec.points()], jobs)


# --- artifacts ------------------------------------------------------------

TRACE_COLUMNS = ("t", "v_dc1", "v_dc2", "i_L", "i_a", "i_b", "i_c", "n_series",
                 "gate_a", "gate_b", "gate_c")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_number(float(x))
    return str(x)


def metrics_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_COLUMNS)
    for r in rows:
        d = r.row()
        w.writerow([_cell(d[c]) for c in METRICS_COLUMNS])
    return buf.getvalue()


def trace_csv(trace: SimTrace) -> str:
    n_mod = trace.states.shape[1]
    header = list(TRACE_COLUMNS) + [f"i_mdl_{k + 1}" for k in range(n_mod)]
    cols = [
        list(map(format_number, trace.t.tolist())),
        list(map(format_number, trace.v_dc1.tolist())),
        list(map(format_number, trace.v_dc2.tolist())),
        list(map(format_number, trace.i_L.tolist())),
        list(map(format_number, trace.i_a.tolist())),
        list(map(format_number, trace.i_b.tolist())),
        list(map(format_number, trace.i_c.tolist())),
        list(map(str, trace.n_series.tolist())),
    ]
    cols.extend(list(map(str, trace.gates[:, x].astype(int).tolist())) for x in range(3))
    mod = trace.module_currents
    cols.extend(list(map(format_number, mod[:, k].tolist())) for k in range(n_mod))
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit_artifacts(trace: SimTrace, report: MetricsReport, directory) -> list[Path]:
    """Write trace.csv, metrics.csv and the resolved scenario.ini into ``directory``."""
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from exc
    files = [out / "trace.csv", out / "metrics.csv"]
    _write(files[0], trace_csv(trace))
    _write(files[1], metrics_csv([report]))
    if trace.scenario is not None:
        files.append(out / "scenario.ini")
        _write(files[2], serialize_scenario(trace.scenario))
    return files
