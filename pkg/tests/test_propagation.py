import math

import pytest
from hypothesis import given, settings, strategies as st

from d2dtea.errors import InvalidElevation, NonPositiveInput, ValidationError
from d2dtea.propagation import (AtmosParams, RainParams, atmospheric_attenuation_db,
                                db_to_linear, free_space_path_loss_db, link_budget,
                                linear_to_db, noise_power_dbw, rain_attenuation_db)


def test_fspl_frozen():
    assert free_space_path_loss_db(500.0, 2000.0) == pytest.approx(152.45, abs=1e-12)
    assert free_space_path_loss_db(1.0, 1.0) == pytest.approx(32.45, abs=1e-12)


@pytest.mark.parametrize("d,f", [(0.0, 2000.0), (500.0, 0.0), (-1.0, 10.0)])
def test_fspl_rejects(d, f):
    with pytest.raises(NonPositiveInput):
        free_space_path_loss_db(d, f)


@settings(max_examples=100)
@given(d=st.floats(1e-3, 1e5), f=st.floats(1.0, 1e5))
def test_fspl_doubling(d, f):
    delta = free_space_path_loss_db(2 * d, f) - free_space_path_loss_db(d, f)
    assert abs(delta - 20 * math.log10(2)) < 1e-9
    assert abs(20 * math.log10(2) - 6.0206) < 1e-4


def test_rain_frozen():
    # mpmath: 0.000265 * 25**1.312 = 0.01808602660294984
    p = RainParams(25.0, 0.000265, 1.312)
    assert rain_attenuation_db(p) == pytest.approx(0.01808602660294984, rel=1e-12)
    assert rain_attenuation_db(RainParams(0.0, 0.000265, 1.312)) == 0.0


def test_rain_for_carrier():
    p = RainParams.for_carrier(2000.0, 25.0)
    assert (p.k_coeff, p.gamma_exp) == (0.0000847, 1.0664)
    with pytest.raises(ValidationError):
        RainParams(-1.0, 0.1, 1.0)


@settings(max_examples=60)
@given(rate=st.floats(0, 200), k=st.floats(1e-6, 1.0), g=st.floats(0.5, 2.0),
       s=st.floats(0.1, 10))
def test_rain_hand_formula(rate, k, g, s):
    assert abs(rain_attenuation_db(RainParams(rate, k, g, s)) - s * k * rate ** g) \
        <= 1e-12 * max(1.0, s * k * rate ** g)


def test_atmos():
    p = AtmosParams(0.5, 10.0)
    assert atmospheric_attenuation_db(p, 90.0) == pytest.approx(0.5)
    assert atmospheric_attenuation_db(p, 30.0) == pytest.approx(1.0)
    # clamped below the minimum elevation
    assert atmospheric_attenuation_db(p, 2.0) == atmospheric_attenuation_db(p, 10.0)
    with pytest.raises(InvalidElevation):
        atmospheric_attenuation_db(p, 0.0)
    with pytest.raises(InvalidElevation):
        atmospheric_attenuation_db(p, 91.0)


def test_noise_frozen():
    # kTB at 290 K over 10 MHz, plus 7 dB NF
    assert noise_power_dbw(1e7) == pytest.approx(-126.9751871942281, abs=1e-9)
    assert noise_power_dbw(1e8) - noise_power_dbw(1e7) == pytest.approx(10.0)
    with pytest.raises(NonPositiveInput):
        noise_power_dbw(0.0)


@given(x=st.floats(-200, 200))
def test_db_roundtrip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-9)


def test_link_budget_composition():
    lb = link_budget(500.0, 2000.0, 60.0, 1e7, RainParams(25.0, 0.0000847, 1.0664),
                     AtmosParams(), 90.0)
    assert lb.path_loss_db == pytest.approx(152.45)
    assert lb.received_dbw == pytest.approx(60.0 - 152.45 - lb.rain_att_db - 0.5)
