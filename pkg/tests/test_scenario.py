import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pulsedrive.reference import Strategy
from pulsedrive.runner import bundled
from pulsedrive.scenario import (
    ParseError, ValidationError, format_number, load_scenario, parse_number, parse_scenario,
    serialize_scenario,
)

BENCH = bundled("bench_passive.ini").read_text()
BUNDLED = ["table2.ini", "thd_rl.ini", "bench_passive.ini", "balancing.ini", "spinup.ini"]


def test_table2_document():
    sc = load_scenario(bundled("table2.ini"))
    assert sc.strategy is Strategy.PROPOSED
    assert sc.backend.n_mdl == 16 and list(sc.backend.v_mdl) == [40.0] * 16
    assert sc.backend.f_mdl == 5e3 and sc.f_inv == 10e3
    assert sc.v_link_max == 640.0
    assert sc.m == pytest.approx(0.95)
    assert sc.filter.L == 30e-6 and sc.filter.C == 60e-6
    # matched load draws 200 A peak at pf 0.9
    z = math.hypot(sc.load.r, 2 * math.pi * 50 * sc.load.l)
    assert sc.reference.amplitude / z == pytest.approx(200.0)


def test_default_timing():
    sc = load_scenario(bundled("table2.ini"))
    assert sc.settle_time == pytest.approx(0.06) and sc.duration == pytest.approx(0.1)
    # a fundamental period is a whole number of trace samples
    per = sc.period / (sc.dt * sc.decimation)
    assert per == pytest.approx(round(per), abs=1e-9)
    assert sc.dt * sc.decimation == pytest.approx(1e-6, rel=0.1)


def test_missing_load_r():
    text = BENCH.replace("r = 2.2\n", "")
    with pytest.raises(ValidationError) as exc:
        parse_scenario(text)
    assert "load.r is required" in exc.value.errors


def test_all_errors_reported():
    with pytest.raises(ValidationError) as exc:
        parse_scenario(BENCH, ["filter.C=0", "load.r=-1", "pwm.f_inv=0"])
    errs = exc.value.errors
    assert "filter.C must be > 0" in errs
    assert "load.r must be >= 0" in errs
    assert "pwm.f_inv must be > 0" in errs


def _line_of(text, needle):
    return next(i for i, ln in enumerate(text.splitlines(), 1) if ln.startswith(needle))


def test_unknown_key_reports_line():
    text = BENCH.replace("l = 100u\n", "l = 100u\nbogus = 1\n")
    with pytest.raises(ParseError) as exc:
        parse_scenario(text)
    assert exc.value.key == "load.bogus"
    assert exc.value.line == _line_of(text, "bogus")
    assert f"line {exc.value.line}" in str(exc.value)


def test_unknown_section_and_bad_number():
    with pytest.raises(ParseError) as exc:
        parse_scenario(BENCH + "\n[extra]\nx = 1\n")
    assert exc.value.key == "extra"
    text = BENCH.replace("L = 30u", "L = 30x")
    with pytest.raises(ParseError) as exc:
        parse_scenario(text)
    assert exc.value.key == "filter.L" and exc.value.line == _line_of(text, "L = 30x")


def test_duplicate_key():
    with pytest.raises(ParseError) as exc:
        parse_scenario(BENCH.replace("r = 2.2\n", "r = 2.2\nr = 3\n"))
    assert exc.value.key == "load.r"


@pytest.mark.parametrize("name", BUNDLED)
def test_round_trip(name):
    sc = load_scenario(bundled(name))
    text = serialize_scenario(sc)
    again = parse_scenario(text)
    assert again == sc
    assert serialize_scenario(again) == text


def test_overrides():
    sc = parse_scenario(BENCH, ["reference.m=0.5", "devices.igbt.e_on=12m", "backend.f_mdl=2.5k"])
    assert sc.m == pytest.approx(0.5)
    assert sc.igbt.e_on == 0.012
    assert sc.backend.f_mdl == 2500.0
    with pytest.raises(ParseError):
        parse_scenario(BENCH, ["reference.m"])
    with pytest.raises(ParseError):
        parse_scenario(BENCH, ["m=0.5"])


# one mutation per invariant; each must surface through the parse path
MUTATIONS = [
    (["scenario.strategy=foo"], "scenario.strategy"),
    (["reference.m=-0.1"], "reference.m"),
    (["reference.amplitude=100"], "mutually exclusive"),
    (["reference.frequency=0"], "reference.frequency"),
    (["reference.ramp_time=-1"], "reference.ramp_time"),
    (["backend.n_mdl=0"], "backend.n_mdl"),
    (["backend.v_mdl=-1"], "v_mdl"),
    (["backend.f_mdl=0"], "f_mdl"),
    (["backend.capacity=0"], "capacity"),
    (["backend.r_int=-1"], "r_int"),
    (["backend.offsets=0.1,-0.1"], "backend.offsets must have n_mdl entries"),
    (["backend.offsets=0.1,0,0,0,0,0,0,0"], "backend.offsets must sum to zero"),
    (["backend.soc=0.5"], "backend.soc must have n_mdl entries"),
    (["backend.soc=1.5,1,1,1,1,1,1,1"], "backend.soc entries"),
    (["scenario.strategy=svpwm"], "backend.vdc is required"),
    (["scenario.strategy=dpwm", "backend.vdc=-5"], "backend.vdc must be > 0"),
    (["pwm.f_inv=0"], "pwm.f_inv"),
    (["filter.L=0"], "filter.L"),
    (["filter.C=-1"], "filter.C"),
    (["filter.r_L=-1"], "filter.r_L"),
    (["load.r=-1"], "load.r"),
    (["load.l=-1"], "load.l"),
    (["load.kind=bogus"], "load.kind"),
    (["load.backemf=5"], "backemf"),
    (["load.pf=0.9"], "mutually exclusive"),
    (["devices.igbt.r_on=-1"], "devices.igbt.r_on"),
    (["devices.fet.v_ref=0"], "devices.fet.v_ref"),
    (["devices.fet.v_on0=0.1"], "devices.fet.v_on0"),
    (["timing.dt=-1"], "timing.dt must be > 0"),
    (["timing.dt=1u"], "timing.dt exceeds"),
    (["timing.trace_dt=0"], "timing.trace_dt"),
    (["timing.settle_time=-1"], "timing.settle_time must be >= 0"),
    (["timing.duration=0"], "timing.duration must be > 0"),
    (["timing.settle_time=1", "timing.duration=0.5"], "timing.settle_time must be shorter"),
    (["metrics.thd_harmonics=1"], "metrics.thd_harmonics"),
]


@pytest.mark.parametrize("overrides,needle", MUTATIONS)
def test_mutation_reaches_validation(overrides, needle):
    with pytest.raises(ValidationError) as exc:
        parse_scenario(BENCH, overrides)
    assert any(needle in e for e in exc.value.errors), exc.value.errors


def test_matched_load_document_errors():
    base = bundled("table2.ini").read_text()
    with pytest.raises(ValidationError) as exc:
        parse_scenario(base.replace("pf = 0.9\n", ""))
    assert any("together" in e for e in exc.value.errors)
    with pytest.raises(ValidationError):
        parse_scenario(base, ["load.pf=1.5"])


def test_suffix_examples():
    assert parse_number("30u") == 30e-6
    assert parse_number("60u") == 6e-05
    assert parse_number("5k") == 5000.0
    assert parse_number("0.1m") == 1e-4
    assert parse_number("inf") == math.inf
    assert parse_number(" -2.5e3 ") == -2500.0
    for bad in ("", "1x", "k", "1.2.3", "nan"):
        with pytest.raises(ValueError):
            parse_number(bad)


@given(st.integers(-10 ** 9, 10 ** 9), st.integers(0, 6), st.sampled_from(["u", "m", "k"]))
def test_suffix_is_exact_decimal_scaling(mant, places, suffix):
    digits = f"{mant / 10 ** places:.{places}f}"
    exp = {"u": "e-6", "m": "e-3", "k": "e3"}[suffix]
    # Python's float() rounds the decimal text correctly: an independent oracle
    assert parse_number(digits + suffix) == float(digits + exp)


@given(st.floats(allow_nan=False))
def test_format_number_round_trips(x):
    assert parse_number(format_number(x)) == x
