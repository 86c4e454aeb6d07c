import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from d2dtea.constellation import (GroundReceiver, OrbitShell, ReceiverGrid, build_constellation,
                                  nearest_satellite)
from d2dtea.errors import ValidationError
from d2dtea.interference import (BeamLayout, GainPattern, InterferenceResult, covered_mean,
                                 grid_inter_satellite, inter_beam_interference_w,
                                 inter_satellite_interference_w, off_axis_gain)

SHELL = OrbitShell(500.0, 10, 50, 18.0)


def brute_int_s(rx, sats, eirp_dbw, freq, top_n, floor=1e-3):
    """Plain-Python reference: loop, sort, sum."""
    r = 6371.0 + rx.height_m / 1000.0
    la, lo = math.radians(rx.latitude_deg), math.radians(rx.longitude_deg)
    z = (math.cos(la) * math.cos(lo), math.cos(la) * math.sin(lo), math.sin(la))
    p = tuple(r * c for c in z)
    vis = []
    for s in sats:
        v = tuple(a - b for a, b in zip(s.position, p))
        if sum(a * b for a, b in zip(v, z)) > 0:
            vis.append((math.sqrt(sum(a * a for a in v)), s.orbit_index, s.slot_index, v))
    vis.sort(key=lambda t: t[0])
    d0, _, _, v0 = vis[0]
    total = []
    chosen = vis[1:] if top_n is None else vis[1:top_n + 1]
    for d, _, _, v in chosen:
        c = sum(a * b for a, b in zip(v, v0)) / (d * d0)
        th = math.degrees(math.acos(max(-1.0, min(1.0, c))))
        g = max(math.cos(math.radians(th)) ** 2, floor) if th <= 90 else floor
        pl = 20 * math.log10(d) + 20 * math.log10(freq) + 32.45
        total.append(10 ** ((eirp_dbw - pl) / 10) * g)
    return math.fsum(total), vis


def test_gain_pattern_values():
    assert off_axis_gain(0.0) == 1.0
    assert off_axis_gain(45.0) == pytest.approx(0.5)
    assert off_axis_gain(90.0) == 1e-3
    assert off_axis_gain(120.0) == 1e-3
    assert off_axis_gain(89.99) == 1e-3  # cos^2 below the floor
    np.testing.assert_allclose(off_axis_gain(np.array([0.0, 60.0])), [1.0, 0.25])


def test_gain_narrow_main_lobe():
    p = GainPattern(1e-2, 30.0)
    assert off_axis_gain(20.0, p) == pytest.approx(math.cos(math.radians(20)) ** 2)
    assert off_axis_gain(31.0, p) == 1e-2


@settings(max_examples=100)
@given(theta=st.floats(-360, 360), floor=st.floats(0, 0.5))
def test_gain_bounded(theta, floor):
    g = off_axis_gain(theta, GainPattern(floor))
    assert floor <= g <= 1.0


def test_pattern_validation():
    with pytest.raises(ValidationError):
        GainPattern(1.5)
    with pytest.raises(ValidationError):
        BeamLayout(0)


def test_beam_angles():
    np.testing.assert_allclose(BeamLayout(4).beam_angles_deg(), [0, 30, 60, 90])
    np.testing.assert_allclose(BeamLayout(1).beam_angles_deg(), [0])


def test_inter_beam_closed_form():
    per = 10 ** ((60 - 150) / 10)
    assert inter_beam_interference_w(BeamLayout(1), 60, 150) == 0.0
    assert inter_beam_interference_w(BeamLayout(2), 60, 150) == pytest.approx(1e-3 * per)
    assert inter_beam_interference_w(BeamLayout(3), 60, 150) == pytest.approx(
        (0.5 + 1e-3) * per)


def test_inter_beam_increasing_over_presets():
    vals = [inter_beam_interference_w(BeamLayout(b), 60, 150) for b in (64, 1000, 2800)]
    assert vals[0] < vals[1] < vals[2]


@settings(max_examples=30, deadline=None)
@given(b=st.integers(1, 500))
def test_inter_beam_monotone_in_beams(b):
    lo = inter_beam_interference_w(BeamLayout(b), 60, 150)
    hi = inter_beam_interference_w(BeamLayout(b + 1), 60, 150)
    assert hi > lo


@pytest.mark.parametrize("lat,lon", [(0.0, 0.0), (10.0, 37.0), (-45.0, 120.0), (80.0, -170.0)])
def test_inter_satellite_matches_brute_force(lat, lon):
    sats = build_constellation(SHELL)
    rx = GroundReceiver(lat, lon)
    serving = nearest_satellite(rx, sats)
    for top_n in (5, None):
        ref, _ = brute_int_s(rx, sats, 60.0, 2700.0, top_n)
        got = inter_satellite_interference_w(rx, sats, serving, 60.0, top_n=top_n,
                                             frequency_mhz=2700.0)
        assert got == pytest.approx(ref, rel=1e-9)


def test_inter_satellite_no_interferers():
    sats = build_constellation(OrbitShell(500.0, 1, 1, 0.0))
    rx = GroundReceiver(0.0, 0.0)
    assert inter_satellite_interference_w(rx, sats, sats[0], 60.0) == 0.0


def test_grid_cells_and_mean():
    sats = build_constellation(OrbitShell(500.0, 1, 20, 0.0))
    cells = grid_inter_satellite(ReceiverGrid(30, 60).receivers(), sats, 60.0, 2000.0)
    covered = [c for c in cells if c.covered]
    assert 0 < len(covered) < len(cells)
    assert all(c.inter_satellite_w == 0.0 for c in cells if not c.covered)
    assert covered_mean(cells) == pytest.approx(
        sum(c.inter_satellite_w for c in covered) / len(covered))
    assert covered_mean([]) == 0.0


def test_combine():
    r = InterferenceResult.combine(1.0, 2.0)
    assert r.total_w == 3.0
