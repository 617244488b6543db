import csv
import io
import subprocess
import sys

import pytest

from pulsedrive.cli import main
from pulsedrive.metrics import METRICS_COLUMNS
from pulsedrive.runner import (
    bundled, load_sweep, metrics_csv, parse_sweep, run_comparison, run_scenario, sweep,
)
from pulsedrive.scenario import load_scenario

BENCH = str(bundled("bench_passive.ini"))
TABLE2 = str(bundled("table2.ini"))


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_writes_artifacts(tmp_path, capsys):
    assert main(["run", BENCH, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(METRICS_COLUMNS)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["metrics.csv", "scenario.ini", "trace.csv"]
    assert (tmp_path / "metrics.csv").read_text() == out
    trace, _ = run_scenario(load_scenario(BENCH))
    lines = (tmp_path / "trace.csv").read_bytes().split(b"\n")
    assert lines[-1] == b""
    assert len(lines) - 1 == len(trace.t) + 1
    header = lines[0].decode().split(",")
    assert header[:11] == ["t", "v_dc1", "v_dc2", "i_L", "i_a", "i_b", "i_c", "n_series",
                           "gate_a", "gate_b", "gate_c"]
    assert header[11:] == [f"i_mdl_{k}" for k in range(1, 9)]
    assert b"\r" not in (tmp_path / "trace.csv").read_bytes()


def test_artifacts_byte_identical(tmp_path, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["run", BENCH, "--out", str(a)]) == 0
    assert main(["run", BENCH, "--out", str(b)]) == 0
    # the emitted scenario fully determines the run
    assert main(["run", str(a / "scenario.ini"), "--out", str(c)]) == 0
    capsys.readouterr()
    for name in ("trace.csv", "metrics.csv", "scenario.ini"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()


def test_run_overrides(capsys):
    assert main(["run", BENCH, "--set", "reference.m=0.5", "--set", "timing.duration=80m"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert float(row["m"]) == pytest.approx(0.5)


def test_exit_codes(tmp_path, capsys):
    assert main(["run", BENCH, "--set", "filter.C=0"]) == 2
    assert main(["run", BENCH, "--set", "nodot=1"]) == 2
    assert main(["run", BENCH, "--set", "filter.L=1e-12", "--set", "filter.C=1e-12"]) == 3
    assert main(["run", str(tmp_path / "missing.ini")]) == 4
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", BENCH, "--out", str(blocker / "sub")]) == 4
    err = capsys.readouterr().err
    assert "filter.C must be > 0" in err and "missing.ini" in err
    with pytest.raises(SystemExit) as exc:
        main(["freq-response", "--L", "abc", "--C", "60u", "--f", "1k"])
    assert exc.value.code == 2


def test_freq_response(capsys):
    assert main(["freq-response", "--L", "30u", "--C", "60u", "--Req", "3", "--f", "0,1k"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [float(r["f"]) for r in rows] == [0.0, 1000.0]
    assert float(rows[0]["gain"]) == 1.0
    assert float(rows[1]["gain"]) == pytest.approx(1.07405, abs=5e-5)
    assert float(rows[1]["phase_deg"]) == pytest.approx(-3.870, abs=5e-3)
    assert main(["freq-response", "--L", "0", "--C", "60u", "--f", "1k"]) == 2


def test_compare(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    assert main(["compare", TABLE2, "--m", "0.95", "--pf", "0.9", "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert [r["strategy"] for r in rows] == ["proposed", "dpwm", "svpwm"]
    assert all(r["error"] == "" for r in rows)
    assert all(float(r["pf"]) == 0.9 for r in rows)


def test_comparison_deterministic():
    base = load_scenario(TABLE2)
    a = metrics_csv(run_comparison(base, [0.5], [0.6]))
    b = metrics_csv(run_comparison(base, [0.5], [0.6], jobs=2))
    assert a == b


def _sweep_file(tmp_path, axes, extra=""):
    p = tmp_path / "s.ini"
    p.write_text(f"[sweep]\nbase = {BENCH}\n{extra}\n[axes]\n{axes}\n")
    return p


def test_single_point_sweep_equals_run(tmp_path):
    rows = sweep(load_sweep(_sweep_file(tmp_path, "reference.m = 0.95")))
    _, report = run_scenario(load_scenario(BENCH))
    assert metrics_csv(rows) == metrics_csv([report])


def test_noop_axis_matches_base(tmp_path):
    rows = sweep(load_sweep(_sweep_file(tmp_path, "load.r = 2.2")))
    _, report = run_scenario(load_scenario(BENCH))
    assert metrics_csv(rows) == metrics_csv([report])


def test_sweep_order_and_row_errors(tmp_path, capsys):
    f = _sweep_file(tmp_path, "scenario.strategy = proposed, svpwm\nreference.m = 0.5, 0.9")
    assert main(["sweep", str(f), "--jobs", "2"]) == 2
    rows = _rows(capsys.readouterr().out)
    assert [(r["strategy"], r["error"] == "") for r in rows] == [
        ("proposed", True), ("proposed", True), ("svpwm", False), ("svpwm", False)]
    assert [float(r["m"]) for r in rows[:2]] == pytest.approx([0.5, 0.9])
    assert "backend.vdc is required" in rows[2]["error"]


def test_sweep_cap(tmp_path, capsys):
    f = _sweep_file(tmp_path, "reference.m = 0.5, 0.9", "cap = 1")
    assert main(["sweep", str(f)]) == 2
    assert "cap" in capsys.readouterr().err


def test_bundled_thd_sweep_grid():
    spec = load_sweep(bundled("thd_sweep.ini"))
    pts = spec.points()
    assert spec.size == 42 and len(pts) == 42
    assert pts[0] == ("scenario.strategy=proposed", "reference.m=0.3")
    assert pts[1] == ("scenario.strategy=proposed", "reference.m=0.35")
    assert pts[14] == ("scenario.strategy=svpwm", "reference.m=0.3")


def test_sweep_document_errors(tmp_path):
    from pulsedrive.scenario import ParseError, ValidationError
    with pytest.raises(ValidationError):
        parse_sweep("[sweep]\n")
    with pytest.raises(ParseError):
        parse_sweep(f"[sweep]\nbase = {BENCH}\n[other]\n")
    with pytest.raises(ParseError):
        parse_sweep(f"[sweep]\nbase = {BENCH}\nbogus = 1\n")


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "pulsedrive.cli", "freq-response", "--L", "30u",
                           "--C", "60u", "--f", "1k"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("f,gain,phase_deg\n1000.0,")
