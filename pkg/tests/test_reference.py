import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsedrive.reference import (
    EPS_ENV, SQRT3, TWO_PI, DegenerateReference, ModTriple, PhaseTriple, ReferenceState, Sector,
    advance_angle, amplitude_from_index, dpwm_common_mode, dpwm_refs, envelope_dc_ref,
    frontend_mod_indices, gen_three_phase_refs, identify_sector, line_voltages, modulation_index,
    sector_index, svpwm_refs, table_mod_indices,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_gen_refs_apex():
    p = gen_three_phase_refs(ReferenceState(1.0, 50.0, math.pi / 2))
    assert p == pytest.approx((1.0, -0.5, -0.5), abs=1e-15)


def test_gen_refs_zero_amplitude():
    p = gen_three_phase_refs(ReferenceState(0.0, 50.0, 1.234))
    assert tuple(p) == (0.0, 0.0, 0.0)


def test_gen_refs_sixty_degrees():
    p = gen_three_phase_refs(ReferenceState(1.0, 50.0, math.pi / 3))
    assert p == pytest.approx((0.86603, -0.86603, 0.0), abs=5e-6)


@given(st.floats(0, 500), st.floats(0, TWO_PI, exclude_max=True))
def test_gen_refs_balanced(amp, theta):
    p = gen_three_phase_refs(ReferenceState(amp, 50.0, theta))
    assert abs(p.va + p.vb + p.vc) <= 1e-9 * max(amp, 1.0)


def test_envelope_examples():
    assert envelope_dc_ref(PhaseTriple(1.0, -0.5, -0.5)) == 1.5
    assert envelope_dc_ref(PhaseTriple(0.0, 0.0, 0.0)) == 0.0


@given(finite, finite, finite)
def test_envelope_is_largest_line_voltage(a, b, c):
    p = PhaseTriple(a, b, c)
    # brute force over the six signed line voltages
    lines = [x - y for x in (a, b, c) for y in (a, b, c)]
    assert envelope_dc_ref(p) == pytest.approx(max(lines), abs=1e-12)
    assert envelope_dc_ref(p) >= 0


def test_envelope_six_pulse_sweep():
    theta = np.linspace(0, TWO_PI, 10_000, endpoint=False)
    env = envelope_dc_ref(gen_three_phase_refs(ReferenceState(1.0, 50.0), theta))
    assert env.min() == pytest.approx(1.5, abs=1e-6)
    assert env.max() == pytest.approx(SQRT3, abs=1e-6)
    # period pi/3
    shifted = envelope_dc_ref(gen_three_phase_refs(ReferenceState(1.0, 50.0), theta + math.pi / 3))
    assert np.allclose(env, shifted, atol=1e-12)


def test_sector_examples():
    assert identify_sector(PhaseTriple(0.86603, -0.86603, 0.0)) is Sector.VI
    # v_ab and v_ac tie at 1.5: smallest id wins
    assert identify_sector(PhaseTriple(1.0, -0.5, -0.5)) is Sector.I


def test_sector_degenerate():
    with pytest.raises(DegenerateReference):
        identify_sector(PhaseTriple(0.0, 0.0, 0.0))
    assert sector_index(PhaseTriple(0.0, 0.0, 0.0)) == 0


def test_sector_sequence_visits_each_once_per_cycle():
    theta = (np.arange(6000) + 0.5) * TWO_PI / 6000
    idx = sector_index(gen_three_phase_refs(ReferenceState(1.0, 50.0), theta))
    runs = [int(idx[0])] + [int(b) for a, b in zip(idx[:-1], idx[1:]) if a != b]
    # a cycle that starts mid-sector re-enters the first sector at its end
    if runs[-1] == runs[0]:
        runs.pop()
    assert sorted(runs) == [1, 2, 3, 4, 5, 6]
    assert len(runs) == 6


def test_sector_matches_max_line_voltage():
    rng = np.random.default_rng(1)
    p = PhaseTriple(*rng.normal(size=(3, 1000)))
    lv = line_voltages(p)
    idx = sector_index(p)
    assert np.all(lv[np.arange(1000), idx - 1] == lv.max(axis=1))


def test_frontend_examples():
    m, deg = frontend_mod_indices(PhaseTriple(0.86603, -0.86603, 0.0))
    assert not deg
    assert m == pytest.approx((1.0, 0.0, 0.5), abs=1e-12)
    m, _ = frontend_mod_indices(PhaseTriple(1.0, -0.5, -0.5))
    assert tuple(m) == (1.0, 0.0, 0.0)


def test_frontend_degenerate_defaults():
    m, deg = frontend_mod_indices(PhaseTriple(0.0, 0.0, 0.0))
    assert deg and tuple(m) == (0.5, 0.5, 0.5)


def test_unified_matches_sector_table_random():
    rng = np.random.default_rng(2024)
    trip = rng.uniform(-1.0, 1.0, size=(100_000, 3))
    p = PhaseTriple(*trip.T)
    unified, deg = frontend_mod_indices(p)
    assert not np.any(deg)
    sectors = sector_index(p)
    got = np.stack(unified, axis=1)
    # evaluate the table row of each sample's sector
    for s in range(1, 7):
        sel = np.nonzero(sectors == s)[0]
        for j in sel[:2000]:
            row = table_mod_indices(PhaseTriple(*trip[j]), Sector(s))
            assert np.allclose(got[j], row, atol=1e-12), (trip[j], s)
        # vectorised check of the remaining rows of this sector
        va, vb, vc = trip[sel].T
        env = envelope_dc_ref(PhaseTriple(va, vb, vc))
        want = {
            1: (np.ones_like(va), (vb - vc) / env, np.zeros_like(va)),
            2: ((va - vc) / env, np.ones_like(va), np.zeros_like(va)),
            3: (np.zeros_like(va), np.ones_like(va), (vc - va) / env),
            4: (np.zeros_like(va), (vb - va) / env, np.ones_like(va)),
            5: ((va - vb) / env, np.zeros_like(va), np.ones_like(va)),
            6: (np.ones_like(va), np.zeros_like(va), (vc - vb) / env),
        }[s]
        assert np.allclose(got[sel], np.stack(want, axis=1), atol=1e-12)


@given(finite, finite, finite)
def test_one_leg_modulates(a, b, c):
    p = PhaseTriple(a, b, c)
    m, deg = frontend_mod_indices(p, nominal=1.0)
    if deg:
        return
    vals = sorted(m)
    assert vals[0] == 0.0 and vals[2] == 1.0
    inside = [x for x in m if 0.0 < x < 1.0]
    assert len(inside) <= 1


def test_dpwm_examples():
    off = dpwm_common_mode(ModTriple(0.8, -0.3, -0.5))
    assert off == pytest.approx(0.2)
    shifted = np.array([0.8, -0.3, -0.5]) + off
    assert shifted == pytest.approx([1.0, -0.1, -0.3])
    assert dpwm_common_mode(ModTriple(0.0, 0.0, 0.0)) == -1.0


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_dpwm_clamps_one_rail(a, b, c):
    off = dpwm_common_mode(ModTriple(a, b, c))
    s = [a + off, b + off, c + off]
    assert max(s) == 1.0 or min(s) == -1.0


def test_dpwm_rests_a_third_of_the_cycle():
    theta = (np.arange(6000) + 0.5) * TWO_PI / 6000
    p = gen_three_phase_refs(ReferenceState(0.75 * 640 / SQRT3, 50.0), theta)
    m, over = dpwm_refs(p, 640.0)
    assert not np.any(over)
    clamped = sum(np.count_nonzero((x == 0.0) | (x == 1.0)) for x in m)
    assert clamped / (3 * len(theta)) == pytest.approx(1 / 3, abs=1e-3)


def test_svpwm_examples():
    m, over = svpwm_refs(PhaseTriple(0.0, 0.0, 0.0), 640.0)
    assert tuple(m) == (0.5, 0.5, 0.5) and not over
    m, _ = svpwm_refs(PhaseTriple(1.0, -0.5, -0.5), 2.0)
    assert m == pytest.approx((0.875, 0.125, 0.125))


def test_svpwm_linear_limit_touches_rails():
    theta = np.linspace(0, TWO_PI, 12_001)
    p = gen_three_phase_refs(ReferenceState(640 / SQRT3, 50.0), theta)
    m, over = svpwm_refs(p, 640.0)
    stacked = np.stack(m)
    assert stacked.max() == pytest.approx(1.0, abs=1e-9)
    assert stacked.min() == pytest.approx(0.0, abs=1e-9)


def test_svpwm_overmodulation_flag():
    _, over = svpwm_refs(PhaseTriple(400.0, -200.0, -200.0), 500.0)
    assert over


def test_index_round_trip():
    assert modulation_index(amplitude_from_index(0.95, 640.0), 640.0) == pytest.approx(0.95)


def test_angle_wraps():
    th = 0.0
    for _ in range(10_000):
        th = advance_angle(th, 50.0, 1e-5)
        assert 0.0 <= th < TWO_PI
    # 10 000 steps of 1e-5 s at 50 Hz is exactly 5 cycles
    assert min(th, TWO_PI - th) < 1e-9


def test_eps_threshold_scales_with_nominal():
    p = PhaseTriple(1e-7, 0.0, 0.0)
    assert sector_index(p, nominal=1.0) != 0
    assert sector_index(p, nominal=1e3) == 0
    assert EPS_ENV == 1e-9
