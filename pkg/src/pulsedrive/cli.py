"""``sim`` command line: run, compare, sweep, freq-response."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .circuit import FilterParams, NumericalBlowup, filter_frequency_response
from .runner import (emit_artifacts, load_sweep, metrics_csv, run_comparison, run_scenario,
                     sweep)
from .scenario import (ParseError, ValidationError, format_number, load_scenario,
                       parse_number)

EXIT_OK, EXIT_VALIDATION, EXIT_SIMULATION, EXIT_IO = 0, 2, 3, 4


def _numbers(text: str) -> list[float]:
    try:
        return [parse_number(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one scenario and print its metrics row")
    run.add_argument("scenario")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE")
    run.add_argument("--out", help="directory for trace.csv, metrics.csv and scenario.ini")

    cmp_ = sub.add_parser("compare", help="proposed, DPWM and SVPWM at matched peak current")
    cmp_.add_argument("scenario")
    cmp_.add_argument("--m", type=_numbers, required=True, help="comma-separated modulation indices")
    cmp_.add_argument("--pf", type=_numbers, required=True, help="comma-separated power factors")
    cmp_.add_argument("--i-peak", type=_number, default=200.0)
    cmp_.add_argument("--set", dest="overrides", action="append", default=[])
    cmp_.add_argument("--jobs", type=int, default=1)
    cmp_.add_argument("--out", help="metrics CSV file (default: stdout)")

    sw = sub.add_parser("sweep", help="grid sweep over scenario keys")
    sw.add_argument("sweep")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out", help="metrics CSV file (default: stdout)")

    fr = sub.add_parser("freq-response", help="gain and phase of the dc-link filter")
    fr.add_argument("--L", type=_number, required=True)
    fr.add_argument("--C", type=_number, required=True)
    fr.add_argument("--Req", type=_number, default=float("inf"))
    fr.add_argument("--rL", type=_number, default=0.0)
    fr.add_argument("--f", type=_numbers, required=True, help="comma-separated frequencies")
    return p


def _emit_table(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {out}: {exc.strerror}") from exc


def _rows_status(rows) -> int:
    errors = [r.error for r in rows if r.error]
    if not errors:
        return EXIT_OK
    if all(e.startswith(("ValidationError", "ParseError")) for e in errors):
        return EXIT_VALIDATION
    return EXIT_SIMULATION


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario, args.overrides)
    trace, report = run_scenario(sc)
    if args.out:
        emit_artifacts(trace, report, args.out)
    sys.stdout.write(metrics_csv([report]))
    return EXIT_OK


def _cmd_compare(args) -> int:
    base = load_scenario(args.scenario, args.overrides)
    rows = run_comparison(base, args.m, args.pf, args.i_peak, args.jobs)
    _emit_table(metrics_csv(rows), args.out)
    return _rows_status(rows)


def _cmd_sweep(args) -> int:
    spec = load_sweep(args.sweep)
    rows = sweep(spec, args.jobs)
    _emit_table(metrics_csv(rows), args.out)
    return _rows_status(rows)


def _cmd_freq(args) -> int:
    filt = FilterParams(args.L, args.C, args.rL, args.Req)
    errors = filt.validate()
    if any(not f >= 0 for f in args.f):
        errors.append("f must be >= 0")
    if errors:
        raise ValidationError(errors)
    gain, phase = filter_frequency_response(filt, np.asarray(args.f, float))
    lines = ["f,gain,phase_deg"]
    lines.extend(f"{format_number(f)},{format_number(g)},{format_number(ph)}"
                 for f, g, ph in zip(args.f, np.atleast_1d(gain), np.atleast_1d(phase)))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "compare": _cmd_compare, "sweep": _cmd_sweep, "freq-response": _cmd_freq}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalBlowup as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
